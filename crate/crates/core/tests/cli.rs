//! Command-line behaviour: exit codes, golden outputs and run persistence.
//!
//! Goldens live in `corpus/<composition>/<name>`; set `NILFIBRE_BLESS=1` to
//! rewrite them after an intended output change.

use std::path::{Path, PathBuf};

use nilfibre::cli::{run, run_dir, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn nilfibre(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("nilfibre").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8"), String::from_utf8(err).expect("utf-8"))
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn golden(composition: &str, name: &str, args: &[&str]) {
    let (code, out, err) = nilfibre(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    let path = corpus().join(composition).join(name);
    if std::env::var_os("NILFIBRE_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(out, expected, "{args:?} differs from {}", path.display());
}

#[test]
fn goldens() {
    golden("1-2-3-1-1-3-2", "enum-components.txt", &["enum-components", "-c", "1,2,3,1,1,3,2"]);
    golden("1-2-3-1-1-3-2", "enum-components.json", &["enum-components", "-c", "1,2,3,1,1,3,2", "--format", "json"]);
    golden("1-2-3-1-1-3-2", "factorize-first-order.txt", &["factorize", "-c", "1,2,3,1,1,3,2", "--sequence", "C1,C4;C4,C5;C2,C7;C3,C6"]);
    golden("1-2-3-1-1-3-2", "factorize-second-order.txt", &["factorize", "-c", "1,2,3,1,1,3,2", "--sequence", "C1,C4;C4,C5;C3,C6;C2,C7"]);
    golden("1-2-1-2", "factorize.json", &["factorize", "-c", "1,2,1,2", "--sequence", "C1,C3;C2,C4", "--format", "json"]);
    golden("1-2-1-2", "invariant-substituted.txt", &["invariant", "-c", "1,2,1,2", "--pair", "C2,C4", "--substitute", "x1,2=1;x1,3=0;x2,4=0"]);
    golden("1-2-1-2", "verify.txt", &["verify", "-c", "1,2,1,2"]);
    golden("1-2-2-1", "invariant-symbolic.txt", &["invariant", "-c", "1,2,2,1", "--symbolic"]);
    golden("3-4-2-1-2-4-3-1", "reverse-standard.txt", &["reverse", "-c", "3,4,2,1,2,4,3,1", "--red-set", "11,12,15,16"]);
    golden("3-4-2-1-2-4-3-1", "reverse-extreme.txt", &["reverse", "-c", "3,4,2,1,2,4,3,1", "--red-set", "11,12,15,16", "--extreme"]);
    golden("2-1-1-2-2", "render-reverse.tex", &["render", "-c", "2,1,1,2,2", "--red-set", "4,6,8", "--view", "reverse", "--format", "latex"]);
    golden("3-2-1-3-2-1-2", "render-infinity.txt", &["render", "-c", "3,2,1,3,2,1,2", "--red-set", "8,9,12,12", "--view", "infinity"]);
}

#[test]
fn component_counts() {
    let (code, out, _) = nilfibre(&["enum-components", "-c", "1,2,3,1,1,3,2", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 6);
    assert_eq!(v["records"].as_array().unwrap().len(), 6);
    let (code, out, _) = nilfibre(&["enum-components", "-c", "5", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["count"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(nilfibre(&["enum-components", "-c", "0,2"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["enum-components", "-c", "1,x"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["reverse", "-c", "1,2,1,2"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["reverse", "-c", "1,2,1,2", "--red-set", "5,5"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["factorize", "-c", "1,2,1,2", "--sequence", "C2,C4"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["invariant", "-c", "1,2,1,2", "--pair", "C1,C2"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["invariant", "-c", "1,2,1,2", "--substitute", "x1,2=1;x1,2=0"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["verify"]).0, EXIT_USAGE);
    assert_eq!(nilfibre(&["verify", "--all-n", "3", "--seed", "nope"]).0, EXIT_USAGE);
}

#[test]
fn verification_commands() {
    let (code, out, _) = nilfibre(&["verify", "-c", "3,4,2,1,2,4,3,1", "--red-set", "11,12,15,16"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("0 uncovered") && out.ends_with("pass\n"), "{out}");
    let (code, out, _) = nilfibre(&["verify", "--all-n", "6"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("n=6: 32 compositions, 36 components"), "{out}");
    // The certificate gap first appears at n = 7; strict mode counts it.
    let (code, out, _) = nilfibre(&["verify", "-c", "1,2,1,1,2", "--strict-certificate"]);
    assert_eq!(code, EXIT_FAILURE, "{out}");
    assert!(out.contains("horizontal-certificate"), "{out}");
    assert_eq!(nilfibre(&["verify", "-c", "1,2,1,1,2"]).0, EXIT_OK);
}

#[test]
fn seeds_reach_the_randomised_tests() {
    let a = nilfibre(&["invariant", "-c", "1,2,1,2", "--red-set", "4,6", "--format", "json", "--seed", "1"]).1;
    let b = nilfibre(&["invariant", "-c", "1,2,1,2", "--red-set", "4,6", "--format", "json", "--seed", "0x1"]).1;
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert!(v["invariants"].as_array().unwrap().iter().all(|i| i["zeroTest"]["zero"] == true));
}

#[test]
fn persisted_runs_have_stable_digests() {
    let root = std::env::temp_dir().join(format!("nilfibre-cli-test-{}", std::process::id()));
    let args = ["enum-components", "-c", "1,2,1,2", "--seed", "7", "--out", root.to_str().unwrap()];
    let mut digests = Vec::new();
    for _ in 0..2 {
        let (code, _, err) = nilfibre(&args);
        assert_eq!(code, EXIT_OK, "{err}");
        let dir = run_dir(&root, "1,2,1,2", "enum-components", 7);
        let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], "0x7");
        assert_eq!(manifest["command"], "enum-components");
        for (name, digest) in manifest["digests"].as_object().unwrap() {
            let body = std::fs::read(dir.join(name)).unwrap();
            let hex: String = Sha256::digest(&body).iter().map(|b| format!("{b:02x}")).collect();
            assert_eq!(digest.as_str().unwrap(), hex, "{name}");
        }
        digests.push(manifest["digests"].clone());
    }
    assert_eq!(digests[0], digests[1]);
    std::fs::remove_dir_all(&root).unwrap();
}
