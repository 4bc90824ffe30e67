//! Transport contract tests against a local scripted HTTP stub.

use lenlift_client::{ClientError, EndpointConfig, HttpClient, HttpJudge, Message};
use lenlift_core::datamodel::BenchmarkEntry;
use lenlift_core::judge::{Preference, DEFAULT_JUDGE_TEMPLATE};
use lenlift_core::lift::render_template;
use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

#[derive(Clone)]
struct StubResponse {
    status: u16,
    body: String,
}

fn completion_body(text: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": text}}]
    })
    .to_string()
}

/// Minimal HTTP/1.1 server: scripted responses in order, then a default;
/// records request bodies and counts hits. One thread per connection.
struct StubServer {
    url: String,
    hits: Arc<AtomicUsize>,
    bodies: Arc<Mutex<Vec<String>>>,
    shutdown: Arc<AtomicBool>,
    port: u16,
}

impl StubServer {
    fn start(script: Vec<StubResponse>, default: StubResponse) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let port = listener.local_addr().unwrap().port();
        let hits = Arc::new(AtomicUsize::new(0));
        let bodies = Arc::new(Mutex::new(Vec::new()));
        let shutdown = Arc::new(AtomicBool::new(false));
        let queue = Arc::new(Mutex::new(VecDeque::from(script)));

        {
            let hits = hits.clone();
            let bodies = bodies.clone();
            let shutdown = shutdown.clone();
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { break };
                    let hits = hits.clone();
                    let bodies = bodies.clone();
                    let queue = queue.clone();
                    let default = default.clone();
                    std::thread::spawn(move || {
                        handle_connection(stream, &hits, &bodies, &queue, &default);
                    });
                }
            });
        }

        StubServer {
            url: format!("http://127.0.0.1:{port}/v1/chat/completions"),
            hits,
            bodies,
            shutdown,
            port,
        }
    }

    fn hit_count(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    fn request_bodies(&self) -> Vec<String> {
        self.bodies.lock().unwrap().clone()
    }

    fn stop(&self) {
        self.shutdown.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(("127.0.0.1", self.port));
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop();
    }
}

fn handle_connection(
    stream: TcpStream,
    hits: &AtomicUsize,
    bodies: &Mutex<Vec<String>>,
    queue: &Mutex<VecDeque<StubResponse>>,
    default: &StubResponse,
) {
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    if reader.read_line(&mut line).unwrap_or(0) == 0 {
        return;
    }
    let mut content_length = 0usize;
    loop {
        let mut header = String::new();
        if reader.read_line(&mut header).unwrap_or(0) == 0 {
            return;
        }
        if header == "\r\n" || header == "\n" {
            break;
        }
        if let Some(value) = header
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(str::trim)
            .map(str::to_owned)
        {
            content_length = value.parse().unwrap_or(0);
        }
    }
    let mut body = vec![0u8; content_length];
    if content_length > 0 {
        reader.read_exact(&mut body).ok();
    }
    hits.fetch_add(1, Ordering::SeqCst);
    bodies
        .lock()
        .unwrap()
        .push(String::from_utf8_lossy(&body).into_owned());

    let response = queue.lock().unwrap().pop_front().unwrap_or(default.clone());
    let payload = response.body.as_bytes();
    let head = format!(
        "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        response.status,
        payload.len()
    );
    let mut stream = reader.into_inner();
    stream.write_all(head.as_bytes()).ok();
    stream.write_all(payload).ok();
    stream.flush().ok();
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "lenlift-http-{tag}-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fast_config(url: &str) -> EndpointConfig {
    let mut cfg = EndpointConfig::new(url, "stub-model");
    cfg.retry_base_ms = 1;
    cfg.timeout_secs = 5;
    cfg
}

#[test]
fn identical_requests_hit_cache_not_network() {
    let server = StubServer::start(
        vec![],
        StubResponse {
            status: 200,
            body: completion_body("cached answer"),
        },
    );
    let dir = temp_dir("cache");
    let client = HttpClient::new(fast_config(&server.url), &dir).unwrap();
    let messages = [Message::user("hello")];
    let first = client.complete(&messages).unwrap();
    let second = client.complete(&messages).unwrap();
    assert_eq!(first, "cached answer");
    assert_eq!(first, second);
    assert_eq!(server.hit_count(), 1, "second call must be served from cache");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rate_limit_then_success_retries_once() {
    let server = StubServer::start(
        vec![
            StubResponse {
                status: 429,
                body: "{\"error\":\"slow down\"}".into(),
            },
            StubResponse {
                status: 200,
                body: completion_body("eventually"),
            },
        ],
        StubResponse {
            status: 500,
            body: "{}".into(),
        },
    );
    let dir = temp_dir("retry");
    let client = HttpClient::new(fast_config(&server.url), &dir).unwrap();
    let text = client.complete(&[Message::user("q")]).unwrap();
    assert_eq!(text, "eventually");
    assert_eq!(server.hit_count(), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn client_errors_do_not_retry() {
    let server = StubServer::start(
        vec![StubResponse {
            status: 400,
            body: "{\"error\":\"bad request\"}".into(),
        }],
        StubResponse {
            status: 200,
            body: completion_body("unreachable"),
        },
    );
    let dir = temp_dir("bad");
    let client = HttpClient::new(fast_config(&server.url), &dir).unwrap();
    let err = client.complete(&[Message::user("q")]).unwrap_err();
    match err {
        ClientError::Http { status, body_excerpt } => {
            assert_eq!(status, 400);
            assert!(body_excerpt.contains("bad request"));
        }
        other => panic!("unexpected error {other}"),
    }
    assert_eq!(server.hit_count(), 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn persistent_failures_exhaust_retries() {
    let server = StubServer::start(
        vec![],
        StubResponse {
            status: 503,
            body: "{}".into(),
        },
    );
    let dir = temp_dir("exhaust");
    let mut cfg = fast_config(&server.url);
    cfg.max_retries = 2;
    let client = HttpClient::new(cfg, &dir).unwrap();
    let err = client.complete(&[Message::user("q")]).unwrap_err();
    assert!(matches!(err, ClientError::RetriesExhausted { attempts: 3, .. }), "got {err}");
    assert_eq!(server.hit_count(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_api_key_names_the_variable() {
    let dir = temp_dir("key");
    let mut cfg = fast_config("http://127.0.0.1:1/unused");
    cfg.api_key_env = Some("LENLIFT_TEST_MISSING_KEY_VAR".into());
    let client = HttpClient::new(cfg, &dir).unwrap();
    let err = client.complete(&[Message::user("q")]).unwrap_err();
    assert!(
        err.to_string().contains("LENLIFT_TEST_MISSING_KEY_VAR"),
        "got {err}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn response_text_is_never_reencoded() {
    let exotic = "emoji \u{1f680}, accents éü, quotes “x” — done.";
    let server = StubServer::start(
        vec![],
        StubResponse {
            status: 200,
            body: completion_body(exotic),
        },
    );
    let dir = temp_dir("unicode");
    let client = HttpClient::new(fast_config(&server.url), &dir).unwrap();
    let text = client.complete(&[Message::user("q")]).unwrap();
    assert_eq!(text, exotic);
    // And again from cache.
    let again = client.complete(&[Message::user("q")]).unwrap();
    assert_eq!(again, exotic);
    std::fs::remove_dir_all(&dir).ok();
}

fn bench_entry(id: &str, target_len: usize) -> BenchmarkEntry {
    BenchmarkEntry {
        id: id.into(),
        original_prompt: format!("Original prompt {id}"),
        li_prompt: render_template(&format!("Original prompt {id}"), target_len),
        target_len,
        baseline_response: Some("baseline words here".into()),
        baseline_source: Some("ref".into()),
    }
}

#[test]
fn benchmark_generation_orders_records_and_replays_offline() {
    let long_answer = vec!["word"; 250].join(" ");
    let server = StubServer::start(
        vec![],
        StubResponse {
            status: 200,
            body: completion_body(&long_answer),
        },
    );
    let dir = temp_dir("genbench");
    let bench = vec![bench_entry("zz", 210), bench_entry("aa", 300)];
    let records =
        lenlift_client::generate_over_benchmark(fast_config(&server.url), &dir, &bench, 4)
            .unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].entry_id, "aa");
    assert_eq!(records[1].entry_id, "zz");
    assert_eq!(records[0].word_count, 250);
    assert!(!records[0].violation, "250 within 300");
    assert!(records[1].violation, "250 against 210");
    assert_eq!(records[0].model_label, "stub-model");

    // Warm cache: stop the server, rerun fully offline, identical bytes.
    server.stop();
    let replay =
        lenlift_client::generate_over_benchmark(fast_config(&server.url), &dir, &bench, 4)
            .unwrap();
    assert_eq!(
        lenlift_core::datamodel::to_jsonl_bytes(&records).unwrap(),
        lenlift_core::datamodel::to_jsonl_bytes(&replay).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn http_judge_parses_verdicts_and_sends_instruction_only() {
    let server = StubServer::start(
        vec![],
        StubResponse {
            status: 200,
            body: completion_body("Output: B"),
        },
    );
    let dir = temp_dir("judge");
    let client = HttpClient::new(fast_config(&server.url), &dir).unwrap();
    let judge = HttpJudge::new(client, DEFAULT_JUDGE_TEMPLATE).unwrap();
    let result = lenlift_core::judge::PairwiseJudge::compare(
        &judge,
        "Tell me about rivers",
        "candidate output",
        "baseline output",
    )
    .unwrap();
    assert_eq!(result.preferred, Preference::Second);
    assert_eq!(result.raw_reply, "Output: B");
    assert_eq!(judge.warning_count(), 0);

    let bodies = server.request_bodies();
    assert_eq!(bodies.len(), 1);
    assert!(bodies[0].contains("Tell me about rivers"));
    assert!(!bodies[0].contains("words or less"), "limit line must never reach the judge");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn http_judge_counts_unparseable_replies() {
    let server = StubServer::start(
        vec![],
        StubResponse {
            status: 200,
            body: completion_body("no verdict to be found here"),
        },
    );
    let dir = temp_dir("judgewarn");
    let client = HttpClient::new(fast_config(&server.url), &dir).unwrap();
    let judge = HttpJudge::new(client, DEFAULT_JUDGE_TEMPLATE).unwrap();
    let result = lenlift_core::judge::PairwiseJudge::compare(&judge, "inst", "a", "b").unwrap();
    assert_eq!(result.preferred, Preference::Tie);
    assert_eq!(judge.warning_count(), 1);
    std::fs::remove_dir_all(&dir).ok();
}
