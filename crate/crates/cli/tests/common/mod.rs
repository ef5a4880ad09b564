#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::process::{Command, Output};
use std::sync::{Arc, Mutex};
use std::thread;

use gizkp_service::{AccountStore, LockoutPolicy, ServiceConfig, VerifierService};

pub struct TestServer {
    pub url: String,
    pub addr: SocketAddr,
    pub svc: Arc<VerifierService>,
}

pub fn config(n: usize, rounds: usize, lockout: LockoutPolicy) -> ServiceConfig {
    ServiceConfig {
        n,
        rounds_total: rounds,
        lockout,
        ..ServiceConfig::default()
    }
}

/// Serves on a loopback port from a background thread for the rest of the
/// test process.
pub fn spawn_server(config: ServiceConfig) -> TestServer {
    let svc = Arc::new(VerifierService::new(config, AccountStore::in_memory()));
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    listener.set_nonblocking(true).unwrap();
    let s = svc.clone();
    thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let l = tokio::net::TcpListener::from_std(listener).unwrap();
            gizkp_service::http::serve_on(s, l).await.unwrap();
        });
    });
    TestServer {
        url: format!("http://{addr}"),
        addr,
        svc,
    }
}

/// Address nothing listens on.
pub fn dead_url() -> String {
    let l = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = l.local_addr().unwrap();
    drop(l);
    format!("http://{addr}")
}

/// Forwards TCP to `upstream`, recording every byte in both directions.
pub struct CaptureProxy {
    pub url: String,
    pub bytes: Arc<Mutex<Vec<u8>>>,
}

pub fn capture_proxy(upstream: SocketAddr) -> CaptureProxy {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let bytes = Arc::new(Mutex::new(Vec::new()));
    let sink = bytes.clone();
    thread::spawn(move || {
        for client in listener.incoming() {
            let Ok(client) = client else { break };
            let server = TcpStream::connect(upstream).unwrap();
            for (mut from, mut to) in [
                (client.try_clone().unwrap(), server.try_clone().unwrap()),
                (server, client),
            ] {
                let sink = sink.clone();
                thread::spawn(move || {
                    let mut buf = [0u8; 16 * 1024];
                    loop {
                        match from.read(&mut buf) {
                            Ok(0) | Err(_) => {
                                let _ = to.shutdown(std::net::Shutdown::Write);
                                break;
                            }
                            Ok(k) => {
                                sink.lock().unwrap().extend_from_slice(&buf[..k]);
                                if to.write_all(&buf[..k]).is_err() {
                                    break;
                                }
                            }
                        }
                    }
                });
            }
        }
    });
    CaptureProxy { url, bytes }
}

pub fn gizkp(args: &[&str], password: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gizkp"));
    cmd.args(args).env_remove("GIZKP_SERVER").env_remove("GIZKP_PASSWORD");
    if let Some(p) = password {
        cmd.env("GIZKP_PASSWORD", p);
    }
    cmd.output().unwrap()
}

pub fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}
