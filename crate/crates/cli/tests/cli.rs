use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_prym");

fn prym(out: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--cache-dir")
        .arg(out.join("cache"))
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn cover_summary_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = prym(dir.path(), &["cover", "--surface", "1,0,1", "--level", "2"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("index 4, r_K = 5, b = 4"), "{s}");
    let m = json(&dir.path().join("manifest.json"));
    let sum = &m["results"]["summary"];
    assert_eq!((sum["index"].as_u64(), sum["r_k"].as_u64()), (Some(4), Some(5)));
    assert_eq!((sum["b"].as_u64(), sum["dim_v"].as_u64()), (Some(4), Some(2)));
}

#[test]
fn cover_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["cover", "--surface", "2,1,0", "--level", "2"];
    assert!(prym(dir.path(), &args).status.success());
    let cached: Vec<_> = std::fs::read_dir(dir.path().join("cache")).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let first = std::fs::read(dir.path().join("cover.json")).unwrap();
    assert!(prym(dir.path(), &args).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("cover.json")).unwrap());
}

#[test]
fn present_lists_peripheral_words() {
    let dir = tempfile::tempdir().unwrap();
    let o = prym(dir.path(), &["present", "--surface", "1,1,1"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert_eq!(s.lines().filter(|l| l.starts_with("puncture") || l.starts_with("boundary")).count(), 2);
}

#[test]
fn invalid_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["cover", "--surface", "0,0,1", "--level", "2"][..],
        &["cover", "--surface", "1,0,1"],
        &["prym", "--surface", "1,0,1", "--quotient", "Q8", "--marking", "a->i,b->i"],
        &["cover", "--surface", "1,0,1", "--level", "2", "--report", "html"],
    ] {
        let o = prym(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn cap_exceeded_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = prym(
        dir.path(),
        &["orbit", "--surface", "1,0,1", "--quotient", "Q8", "--marking", "a->i,b->j", "--vector", "1,0,0,0,0,0", "--cap", "50"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(dir.path().join("orbit.json").exists());
}

#[test]
fn certify_then_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let q8 = ["--surface", "1,0,1", "--quotient", "Q8", "--marking", "a->i,b->j", "--cap", "20000"];
    let o = prym(d, &[&["certify"][..], &q8].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bundle = d.join("certificate-bundle.json");
    let cert = d.join("certificate.json");
    let v = d.join("v");
    let o = prym(&v, &["verify", "--bundle", bundle.to_str().unwrap(), "--cert", cert.to_str().unwrap()]);
    assert!(o.status.success());

    let mut c = json(&cert);
    let x = c["v0"][0].as_i64().unwrap();
    c["v0"][0] = (x + 1).into();
    let bad = d.join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&c).unwrap()).unwrap();
    let o = prym(&v, &["verify", "--bundle", bundle.to_str().unwrap(), "--cert", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&v.join("verify.json"))["pass"], false);
}

#[test]
fn config_file_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["prym", "--surface", "1,0,1", "--level", "3", "--report", "md"];
    assert!(prym(&a, &args).status.success());
    let conf = a.join("run.conf");
    assert!(prym(&b, &["prym", "--config", conf.to_str().unwrap()]).status.success());
    for f in ["bundle.json", "manifest.json", "report.md", "run.conf"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn command_line_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(&conf, "# level 2 torus\nsurface = 1,0,1\nlevel = 2\n").unwrap();
    let out = dir.path().join("o");
    let o = prym(&out, &["cover", "--config", conf.to_str().unwrap(), "--level", "3"]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(out.join("run.conf")).unwrap().contains("level = 3"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = prym(dir.path(), &["selftest", "--cap", "20000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let suites = json(&dir.path().join("selftest.json"));
    assert!(suites.as_array().unwrap().iter().all(|s| s["pass"] == true));
}
