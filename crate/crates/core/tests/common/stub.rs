//! Minimal HTTP/1.1 stub endpoint for client tests.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

pub struct Request {
    pub path: String,
    pub authorization: Option<String>,
    pub body: serde_json::Value,
}

pub type Handler = dyn Fn(usize, &Request) -> (u16, String) + Send + Sync;

#[derive(Default)]
pub struct Stats {
    pub hits: AtomicUsize,
    pub in_flight: AtomicUsize,
    pub high_water: AtomicUsize,
    pub requests: Mutex<Vec<(String, Option<String>, serde_json::Value)>>,
}

pub struct StubServer {
    pub url: String,
    pub stats: Arc<Stats>,
    stop: Arc<AtomicBool>,
}

impl StubServer {
    /// `handler` receives the 0-based hit number and the request.
    pub fn start(delay: Duration, handler: impl Fn(usize, &Request) -> (u16, String) + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let stats = Arc::new(Stats::default());
        let stop = Arc::new(AtomicBool::new(false));
        let handler: Arc<Handler> = Arc::new(handler);
        {
            let stats = stats.clone();
            let stop = stop.clone();
            std::thread::spawn(move || {
                for conn in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        return;
                    }
                    let Ok(conn) = conn else { continue };
                    let stats = stats.clone();
                    let handler = handler.clone();
                    std::thread::spawn(move || serve(conn, &stats, handler.as_ref(), delay));
                }
            });
        }
        Self { url, stats, stop }
    }

    pub fn hits(&self) -> usize {
        self.stats.hits.load(Ordering::SeqCst)
    }

    pub fn high_water(&self) -> usize {
        self.stats.high_water.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.url.trim_start_matches("http://"));
    }
}

fn serve(conn: TcpStream, stats: &Stats, handler: &Handler, delay: Duration) {
    let mut reader = BufReader::new(conn.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
        return;
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_owned();
    let mut content_length = 0;
    let mut authorization = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            let value = value.trim().to_owned();
            match name.to_ascii_lowercase().as_str() {
                "content-length" => content_length = value.parse().unwrap_or(0),
                "authorization" => authorization = Some(value),
                _ => {}
            }
        }
    }
    let mut body = vec![0; content_length];
    if reader.read_exact(&mut body).is_err() {
        return;
    }
    let body: serde_json::Value = serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null);

    let now = stats.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    stats.high_water.fetch_max(now, Ordering::SeqCst);
    let n = stats.hits.fetch_add(1, Ordering::SeqCst);
    stats
        .requests
        .lock()
        .unwrap()
        .push((path.clone(), authorization.clone(), body.clone()));
    std::thread::sleep(delay);
    let (status, text) = handler(n, &Request { path, authorization, body });
    stats.in_flight.fetch_sub(1, Ordering::SeqCst);

    let response = format!(
        "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
        text.len()
    );
    let mut conn = conn;
    let _ = conn.write_all(response.as_bytes());
    let _ = conn.flush();
}

/// Probability response for the classify route.
pub fn probabilities(yes: f64, no: f64) -> String {
    format!(r#"{{"probabilities":{{"Yes":{yes},"No":{no}}}}}"#)
}
