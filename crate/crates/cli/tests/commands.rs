use std::path::Path;
use std::process::{Command, Output};

fn bmgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmgame")).args(args).env_remove("ORACLE_BUDGET").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = bmgame(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("fig4.toml");
    std::fs::write(&inst, ok(&["generate", "fig4", "5"])).unwrap();
    let prof = dir.path().join("out.toml");
    let solved = ok(&["solve", p(&inst), "--out", p(&prof)]);
    assert!(solved.contains("nash equilibrium: yes"));
    let coverage: usize = solved.lines().find_map(|l| l.strip_prefix("coverage: ")).unwrap().parse().unwrap();
    assert!(coverage >= 1);
    assert!(ok(&["verify", p(&inst), p(&prof)]).contains("nash equilibrium: yes"));
}

#[test]
fn verify_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "fig1", "--out-dir", p(dir.path())]);
    let inst = dir.path().join("instance.toml");
    let left = ok(&["verify", p(&inst), p(&dir.path().join("left.profile.toml"))]);
    assert!(left.contains("miller equilibrium: no"), "{left}");
    assert!(left.contains("witness: miller 0 x -> y"), "{left}");
    assert!(ok(&["verify", p(&inst), p(&dir.path().join("right.profile.toml"))]).contains("nash equilibrium: yes"));
}

#[test]
fn oracle_on_fig2() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "fig2", "--out-dir", p(dir.path())]);
    let inst = dir.path().join("instance.toml");
    let out = ok(&["oracle", p(&inst)]);
    assert!(out.contains("equilibria: 2"), "{out}");
    assert!(out.contains("bakers x x x y | millers x x | coverage 3"));
    assert!(out.contains("bakers x x y y | millers x y | coverage 4"));
    assert!(out.contains("price of anarchy: 4/3"));

    let refused = Command::new(env!("CARGO_BIN_EXE_bmgame"))
        .args(["oracle", p(&inst)])
        .env("ORACLE_BUDGET", "3")
        .output()
        .unwrap();
    assert!(!refused.status.success());
    assert!(String::from_utf8_lossy(&refused.stderr).contains("budget"));
    let bad = Command::new(env!("CARGO_BIN_EXE_bmgame"))
        .args(["oracle", p(&inst)])
        .env("ORACLE_BUDGET", "0")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn welfare_on_fig2() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "fig2", "--out-dir", p(dir.path())]);
    let out = ok(&["welfare", p(&dir.path().join("instance.toml")), p(&dir.path().join("right.profile.toml"))]);
    assert_eq!(out, "coverage: 4\nbaker utility sum: 2/1\nmiller utility sum: 4/1\ntotal: 6/1\n");
}

#[test]
fn fig7_script_cycles() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "fig7", "--out-dir", p(dir.path())]);
    let d = |f: &str| dir.path().join(f);
    let trace = d("trace.txt");
    let out = ok(&[
        "dynamics",
        p(&d("instance.toml")),
        "--profile",
        p(&d("start.profile.toml")),
        "--script",
        p(&d("script.toml")),
        "--trace",
        p(&trace),
    ]);
    assert!(out.contains("moves: 7"), "{out}");
    assert!(out.contains("status: cycle: revisits the state after 0 moves up to relabeling x->z y->x z->y"), "{out}");
    let lines = std::fs::read_to_string(trace).unwrap();
    assert_eq!(lines.lines().count(), 7);
    assert_eq!(lines.lines().next().unwrap(), "miller 0 x z 13/6 11/5");

    let exact = ok(&[
        "dynamics",
        p(&d("instance.toml")),
        "--profile",
        p(&d("start.profile.toml")),
        "--script",
        p(&d("script.toml")),
        "--cycle",
        "exact",
    ]);
    assert!(exact.contains("status: script ended"), "{exact}");
}

#[test]
fn dynamics_policies_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("fig1.toml");
    std::fs::write(&inst, ok(&["generate", "fig1"])).unwrap();
    for policy in ["first", "first-millers", "best"] {
        let out = ok(&["dynamics", p(&inst), "--policy", policy, "--budget", "50"]);
        assert!(out.contains("status: "), "{out}");
    }
}

#[test]
fn output_is_deterministic() {
    let a = ok(&["generate", "random", "--bakers", "6", "--locations", "4", "--millers", "3", "--seed", "7"]);
    let b = ok(&["generate", "random", "--bakers", "6", "--locations", "4", "--millers", "3", "--seed", "7"]);
    assert_eq!(a, b);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "version = 1\nlocations = [\"x\"]\nmillers = 1\n[[bakers]]\nrange = [\"w\"]\n").unwrap();
    let out = bmgame(&["solve", p(&bad)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5, bakers[0].range[0]: unknown location \"w\""), "{err}");

    assert!(!bmgame(&["nonsense"]).status.success());
    assert!(!bmgame(&["solve"]).status.success());
    assert!(!bmgame(&["generate", "fig9"]).status.success());
    assert!(!bmgame(&["solve", p(&dir.path().join("missing.toml"))]).status.success());

    let w = dir.path().join("fig7.toml");
    std::fs::write(&w, ok(&["generate", "fig7"])).unwrap();
    assert!(!bmgame(&["solve", p(&w)]).status.success());
}
