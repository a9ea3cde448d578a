use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ojs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ojs")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fixed_sweep_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.conf", "nt=2\nnj=2\nnr=4\nne=4\ns=4\nsnr_db=0,10\ntrials=50\n");
    let out = dir.path().join("f.csv");
    let run = ojs(&["fixed", "--config", &cfg, "--seed", "3", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("snr_db,power,pool_size,scheme,trial,r_bob,c_eve,secrecy,r_bob_loss\n"));
    // --trials overrides the config
    assert_eq!(text.lines().count(), 1 + 2 * 5);
    assert!(dir.path().join("f.summary.csv").exists());
    assert!(dir.path().join("f.meta.json").exists());
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.conf",
        "nt=1\nnj=2\nnr=3\nne=3\nsnr_db=10,15\ntrials=6\nscaling_c=1\nscaling_a=0.5\nschemes=OJS1,RANDOM\n",
    );
    let mut bodies = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("s{workers}.csv"));
        let run = ojs(&["scaling", "--config", &cfg, "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(run.status.success());
        bodies.push(fs::read(&out).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn covering_and_outage_run() {
    let dir = tempfile::tempdir().unwrap();
    let cov = write_config(dir.path(), "c.conf", "nt=1\nnj=2\nnr=3\ncovering_samples=50\n");
    let out = dir.path().join("c.csv");
    assert!(ojs(&["covering", "--config", &cov, "--out", out.to_str().unwrap()]).status.success());
    let out_cfg = write_config(dir.path(), "o.conf", "nt=2\nnj=2\nnr=4\nne=4\nsnr_db=10\ntrials=100\n");
    let out = dir.path().join("o.csv");
    let run = ojs(&["outage", "--config", &out_cfg, "--greedy", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stdout).contains("samples"));
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "b.conf", "nt=2\nnj=2\nnr=3\nne=4\nsnr_db=10\n");
    let run = ojs(&["fixed", "--config", &bad, "--out", dir.path().join("b.csv").to_str().unwrap()]);
    assert!(!run.status.success());
    assert!(!String::from_utf8_lossy(&run.stderr).is_empty());
    let missing = ojs(&["fixed", "--config", "/nonexistent.conf"]);
    assert!(!missing.status.success());
    assert!(!ojs(&["bogus"]).status.success());
}
