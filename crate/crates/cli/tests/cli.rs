use std::path::Path;
use std::process::Command;

use opstat_cli::bundle::parse_bundle;
use opstat_cli::problem::parse_problem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OPSTAT: &str = env!("CARGO_BIN_EXE_opstat");

fn run(args: &[&str]) -> i32 {
    Command::new(OPSTAT).args(args).output().unwrap().status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn shipped_problem_round_trips() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems/moore_penrose.opstat");
    let p = parse_problem(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(p.rules.len(), 3);
    assert_eq!(p.extend, vec!["star".to_string()]);
    assert_eq!(parse_problem(&p.render()).unwrap(), p);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let proved = write(
        dir.path(),
        "p.opstat",
        "obj u;\nconst a, b : u -> u;\nclaim a = b -> b*a = a*a;",
    );
    let refuted = write(
        dir.path(),
        "r.opstat",
        "obj u;\nconst x, y : u -> u;\nclaim x*y = 0 -> y*x = 0;",
    );
    let open = write(
        dir.path(),
        "o.opstat",
        "obj u;\nconst a : u -> u;\nclaim exists y : u -> u . y*a = a*a*a*a;",
    );
    let broken = write(dir.path(), "b.opstat", "obj u;\nclaim = ;");
    assert_eq!(run(&["prove", &proved]), 0);
    assert_eq!(run(&["prove", &refuted]), 1);
    assert_eq!(run(&["prove", &open, "--max-rounds", "2"]), 2);
    assert_eq!(run(&["prove", &broken]), 3);
    assert_eq!(run(&["check-cert", &broken]), 3);
}

#[test]
fn bundles_from_prove_pass_check_cert() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let names = ["a", "b", "c"];
    for i in 0..12 {
        let mut pick = || names[rng.gen_range(0..3)];
        let (p, q, r, s) = (pick(), pick(), pick(), pick());
        let src = format!(
            "obj u;\nconst a, b, c : u -> u;\nclaim {p}*{q} = {r} & {q} = {s} -> {p}*{s}*{s} + {r} = {r}*{s} + {r};"
        );
        let file = write(dir.path(), &format!("f{i}.opstat"), &src);
        let cert = dir.path().join(format!("f{i}.cert"));
        let code = run(&["prove", &file, "--cert-out", cert.to_str().unwrap()]);
        assert_eq!(code, 0, "{src}");
        let text = std::fs::read_to_string(&cert).unwrap();
        assert!(parse_bundle(&text).unwrap().check().iter().all(|&ok| ok));
        assert_eq!(run(&["check-cert", cert.to_str().unwrap()]), 0);
    }
}
