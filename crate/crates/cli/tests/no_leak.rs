//! The password and the secret permutation never appear on the wire or in
//! either side's logs.

mod common;

use std::io::Write;
use std::sync::{Arc, Mutex};

use common::*;
use gizkp_cli::commands::derive;
use gizkp_core::{Credentials, HashId, KdfParams};
use gizkp_service::LockoutPolicy;

#[derive(Clone)]
struct Buf(Arc<Mutex<Vec<u8>>>);

impl Write for Buf {
    fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(b);
        Ok(b.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[test]
fn secrets_stay_local() {
    let logs = Buf(Arc::new(Mutex::new(Vec::new())));
    let sink = logs.clone();
    tracing_subscriber::fmt()
        .with_max_level(tracing::Level::TRACE)
        .with_writer(move || sink.clone())
        .init();

    const PASSWORD: &str = "pA55-w0rd_that-must-not-leak";
    let srv = spawn_server(config(32, 10, LockoutPolicy::disabled()));
    let proxy = capture_proxy(srv.addr);
    let pi = derive(
        &Credentials::new("dora", PASSWORD).unwrap(),
        &KdfParams::new(32, HashId::Sha256).unwrap(),
    )
    .unwrap()
    .pi;

    let mut client_output = Vec::new();
    for (cmd, pw) in [("register", PASSWORD), ("login", PASSWORD), ("login", "wrong")] {
        let o = gizkp(&["-vv", "--server", &proxy.url, "--n", "32", cmd, "--login", "dora"], Some(pw));
        client_output.extend(o.stdout);
        client_output.extend(o.stderr);
    }
    assert!(String::from_utf8_lossy(&client_output).contains("accepted"));

    let wire = proxy.bytes.lock().unwrap().clone();
    let logs = logs.0.lock().unwrap().clone();
    assert!(contains(&wire, b"/v1/session"), "proxy saw the traffic");
    assert!(contains(&logs, b"dora"), "server logs were captured");
    for (name, hay) in [("wire", &wire), ("server logs", &logs), ("client output", &client_output)] {
        assert!(!contains(hay, PASSWORD.as_bytes()), "password in {name}");
        assert!(!contains(hay, pi.as_bytes()), "secret permutation in {name}");
    }
}
