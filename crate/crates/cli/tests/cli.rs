mod common;

use std::process::Output;

use common::*;
use gizkp_cli::simulate::{simulate_over_wire, Adversary, SimulationSpec};
use gizkp_cli::Client;
use gizkp_core::{brute_force_isomorphism, Graph, Permutation};
use gizkp_service::LockoutPolicy;
use serde_json::Value;

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn out(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn err(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn register_then_login() {
    let srv = spawn_server(config(16, 10, LockoutPolicy::disabled()));
    let s = srv.url.as_str();
    let reg = |pw| gizkp(&["--server", s, "--n", "16", "register", "--login", "alice"], Some(pw));

    let o = reg("hunter2");
    assert_eq!(code(&o), 0, "{}", err(&o));
    assert!(out(&o).contains("registered alice"));

    let o = reg("hunter2");
    assert_eq!(code(&o), 0, "re-registering the same password is idempotent");
    assert!(out(&o).contains("already registered"));

    let o = reg("something else");
    assert_eq!(code(&o), 2, "{}", err(&o));

    let o = gizkp(&["--server", s, "login", "--login", "alice"], Some("hunter2"));
    assert_eq!(code(&o), 0, "{}", err(&o));
    let token = out(&o)
        .lines()
        .find_map(|l| l.strip_prefix("token: ").map(str::to_owned))
        .expect("token line");
    assert_eq!(srv.svc.validate_token(&token).as_deref(), Some("alice"));

    let o = gizkp(&["--server", s, "--json", "login", "--login", "alice"], Some("hunter2"));
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&out(&o)).unwrap();
    assert_eq!(v["verdict"], "accepted");

    let o = gizkp(&["--server", s, "login", "--login", "alice"], Some("hunter3"));
    assert_eq!(code(&o), 1, "{}", err(&o));
    assert!(err(&o).contains("authentication failed"));

    let o = gizkp(&["--server", s, "login", "--login", "nobody"], Some("hunter2"));
    assert_eq!(code(&o), 1, "unknown logins look like failed proofs");
}

#[test]
fn size_mismatch_is_reported() {
    let srv = spawn_server(config(16, 4, LockoutPolicy::disabled()));
    let o = gizkp(
        &["--server", &srv.url, "--n", "32", "register", "--login", "x"],
        Some("pw"),
    );
    assert_eq!(code(&o), 6);
    assert!(err(&o).contains("n = 16"), "{}", err(&o));
}

#[test]
fn server_down_is_a_network_error() {
    let url = dead_url();
    for cmd in ["register", "login"] {
        let o = gizkp(&["--server", &url, cmd, "--login", "alice"], Some("pw"));
        assert_eq!(code(&o), 3, "{cmd}: {}", err(&o));
    }
}

#[test]
fn lockout_has_its_own_exit_code() {
    let srv = spawn_server(config(
        16,
        4,
        LockoutPolicy {
            base_delay_ms: 1,
            max_delay_ms: 5,
            lock_threshold: 3,
            lock_duration_secs: 900,
        },
    ));
    let s = srv.url.as_str();
    let o = gizkp(&["--server", s, "--n", "16", "register", "--login", "eve"], Some("right"));
    assert_eq!(code(&o), 0);
    for _ in 0..3 {
        let o = gizkp(&["--server", s, "login", "--login", "eve"], Some("wrong"));
        assert_eq!(code(&o), 1);
    }
    let o = gizkp(&["--server", s, "login", "--login", "eve"], Some("right"));
    assert_eq!(code(&o), 4, "{}", err(&o));
    assert!(err(&o).contains("locked"));
}

#[test]
fn derive_is_deterministic_and_isomorphic() {
    let args = ["--n", "8", "derive", "--login", "carol"];
    let a = gizkp(&args, Some("pw"));
    let b = gizkp(&args, Some("pw"));
    assert_eq!(code(&a), 0, "{}", err(&a));
    assert_eq!(a.stdout, b.stdout);

    let v: Value = serde_json::from_str(&out(&a)).unwrap();
    assert_eq!(v["version"], "GIZKP-v1");
    assert_eq!(v["n"], 8);
    let g1 = Graph::from_hex(v["g1"].as_str().unwrap()).unwrap();
    let g2 = Graph::from_hex(v["g2"].as_str().unwrap()).unwrap();
    let pi = Permutation::from_hex(v["pi"].as_str().unwrap()).unwrap();
    assert_eq!(g1.permuted(&pi).unwrap(), g2);
    let witness = brute_force_isomorphism(&g1, &g2).unwrap().expect("oracle finds an isomorphism");
    assert_eq!(g1.permuted(&witness).unwrap(), g2);

    let c = gizkp(&args, Some("pw2"));
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn derive_matches_shared_vectors() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/golden/kdf_vectors.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    for v in doc["vectors"].as_array().unwrap() {
        let n = v["n"].as_u64().unwrap().to_string();
        let hash = v["hash_id"].as_str().unwrap();
        let o = gizkp(
            &["--n", &n, "--hash", hash, "derive", "--login", v["login"].as_str().unwrap()],
            Some(v["password"].as_str().unwrap()),
        );
        assert_eq!(code(&o), 0, "{}", err(&o));
        let got: Value = serde_json::from_str(&out(&o)).unwrap();
        for key in ["g1", "g2", "pi", "stream_graph_64"] {
            assert_eq!(got[key], v[key], "{key} for {}", v["login"]);
        }
    }
}

fn check_golden(args: &[&str], file: &str) {
    let o = gizkp(args, None);
    assert_eq!(code(&o), 0, "{}", err(&o));
    let got: Value = serde_json::from_str(&out(&o)).unwrap();
    let path = format!("{}/tests/golden/{file}", env!("CARGO_MANIFEST_DIR"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(got, want, "simulation output drifted from {file}");
}

#[test]
fn simulate_output_is_reproducible() {
    check_golden(
        &[
            "--json", "--n", "16", "--rounds", "4", "simulate", "--kind", "cheater", "--trials", "20000",
            "--report-seed", "42",
        ],
        "simulate_cheater_seed42.json",
    );
    check_golden(
        &[
            "--json", "--n", "16", "--rounds", "10", "simulate", "--kind", "honest", "--trials", "2000",
            "--report-seed", "42",
        ],
        "simulate_honest_seed42.json",
    );
}

#[test]
fn simulate_human_output_mentions_confidence() {
    let o = gizkp(&["simulate", "--trials", "5000", "--report-seed", "1"], None);
    assert_eq!(code(&o), 0);
    let text = out(&o);
    assert!(text.contains("exact 95% CI"));
    assert!(text.contains("99.902%"));
}

#[test]
fn simulate_rejects_bad_arguments() {
    assert_eq!(code(&gizkp(&["simulate", "--trials", "0"], None)), 6);
    assert_eq!(code(&gizkp(&["--rounds", "65", "simulate"], None)), 6);
}

#[test]
fn selftest_passes() {
    let o = gizkp(&["selftest"], None);
    assert_eq!(code(&o), 0, "{}", out(&o));
    assert_eq!(out(&o).lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn selftest_catches_reversed_composition() {
    fn reversed(first: &Permutation, second: &Permutation) -> Permutation {
        second.then(first).unwrap()
    }
    let checks = gizkp_cli::selftest::run_all(reversed, 1000);
    assert!(!checks[0].passed);
}

#[test]
fn cheater_over_the_wire() {
    let srv = spawn_server(config(16, 10, LockoutPolicy::disabled()));
    let client = Client::new(&srv.url);
    let spec = SimulationSpec {
        kind: Adversary::Cheater,
        trials: 10_000,
        rounds: 10,
        n: 16,
        report_seed: 5,
    };
    let r = simulate_over_wire(&spec, &client).unwrap();
    assert!(r.over_wire);
    assert!(r.rate <= 0.005, "cheater accepted {} of {}", r.accepted, r.trials);

    let honest = simulate_over_wire(
        &SimulationSpec {
            kind: Adversary::Honest,
            trials: 50,
            ..spec
        },
        &client,
    )
    .unwrap();
    assert_eq!(honest.accepted, 50);
}
