//! JSON-over-HTTP protocol for externally hosted agents.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use image::{DynamicImage, GrayImage, RgbImage};
use serde::{Deserialize, Serialize};

/// One agent invocation: a name plus named text fields and named base64 PNG
/// image fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentRequest {
    pub agent: String,
    #[serde(default)]
    pub text: BTreeMap<String, String>,
    #[serde(default)]
    pub images: BTreeMap<String, String>,
}

/// The agent's reply: `status` is "ok" on success; `text` or `image`
/// (base64 PNG) carries the artifact; `message` explains failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub status: String,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub image: Option<String>,
    #[serde(default)]
    pub message: Option<String>,
}

/// Performs one agent call. Transport failures, non-2xx responses,
/// unparseable bodies, and non-"ok" statuses all surface as `Err`; the
/// orchestrator decides whether to retry.
pub fn call_agent(
    url: &str,
    timeout_ms: u64,
    request: &AgentRequest,
) -> Result<AgentResponse, String> {
    let config = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(timeout_ms)))
        .build();
    let agent = ureq::Agent::new_with_config(config);
    let mut response = agent
        .post(url)
        .send_json(request)
        .map_err(|e| format!("request to {url} failed: {e}"))?;
    let parsed: AgentResponse = response
        .body_mut()
        .read_json()
        .map_err(|e| format!("response from {url} is not agent JSON: {e}"))?;
    if parsed.status != "ok" {
        let detail = parsed
            .message
            .unwrap_or_else(|| "no message supplied".to_string());
        return Err(format!("agent reported `{}`: {detail}", parsed.status));
    }
    Ok(parsed)
}

fn encode_png(image: &DynamicImage) -> String {
    let mut bytes = Vec::new();
    image
        .write_to(&mut Cursor::new(&mut bytes), image::ImageFormat::Png)
        .expect("in-memory PNG encoding cannot fail");
    BASE64.encode(bytes)
}

pub(crate) fn gray_to_base64(image: &GrayImage) -> String {
    encode_png(&DynamicImage::ImageLuma8(image.clone()))
}

pub(crate) fn rgb_to_base64(image: &RgbImage) -> String {
    encode_png(&DynamicImage::ImageRgb8(image.clone()))
}

pub(crate) fn base64_to_image(data: &str) -> Result<DynamicImage, String> {
    let bytes = BASE64
        .decode(data.trim())
        .map_err(|e| format!("image field is not base64: {e}"))?;
    image::load_from_memory(&bytes).map_err(|e| format!("image field is not a decodable image: {e}"))
}

/// The response's image field as grayscale, or an error naming what is
/// missing.
pub(crate) fn require_image_gray(response: &AgentResponse) -> Result<GrayImage, String> {
    let data = response
        .image
        .as_ref()
        .ok_or_else(|| "agent response lacks an image field".to_string())?;
    Ok(base64_to_image(data)?.to_luma8())
}

pub(crate) fn require_image_rgb(response: &AgentResponse) -> Result<RgbImage, String> {
    let data = response
        .image
        .as_ref()
        .ok_or_else(|| "agent response lacks an image field".to_string())?;
    Ok(base64_to_image(data)?.to_rgb8())
}

pub(crate) fn require_text(response: &AgentResponse) -> Result<String, String> {
    response
        .text
        .clone()
        .ok_or_else(|| "agent response lacks a text field".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::sync::mpsc;
    use std::thread;

    /// Accepts one connection, parses the JSON request body, and replies with
    /// the given status line and body. Returns the parsed request.
    fn serve_once(
        listener: TcpListener,
        status_line: &'static str,
        body: String,
    ) -> mpsc::Receiver<AgentRequest> {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let (mut stream, _) = listener.accept().expect("accept");
            let mut buf = Vec::new();
            let mut chunk = [0u8; 4096];
            let (request, _header_len) = loop {
                let n = stream.read(&mut chunk).expect("read");
                buf.extend_from_slice(&chunk[..n]);
                if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                    break (buf.clone(), pos + 4);
                }
                if n == 0 {
                    break (buf.clone(), buf.len());
                }
            };
            let header_text = String::from_utf8_lossy(&request);
            let content_length: usize = header_text
                .lines()
                .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse().unwrap()))
                .unwrap_or(0);
            let header_end = request.windows(4).position(|w| w == b"\r\n\r\n").unwrap() + 4;
            let mut body_bytes = request[header_end..].to_vec();
            while body_bytes.len() < content_length {
                let n = stream.read(&mut chunk).expect("read body");
                body_bytes.extend_from_slice(&chunk[..n]);
            }
            if let Ok(parsed) = serde_json::from_slice::<AgentRequest>(&body_bytes) {
                let _ = tx.send(parsed);
            }
            let reply = format!(
                "{status_line}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).expect("write");
        });
        rx
    }

    fn request_fixture() -> AgentRequest {
        AgentRequest {
            agent: "shape-descriptor".into(),
            text: [("problem_statement".to_string(), "a calm logo".to_string())]
                .into_iter()
                .collect(),
            images: BTreeMap::new(),
        }
    }

    #[test]
    fn ok_text_response_round_trips() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/agent", listener.local_addr().unwrap());
        let seen = serve_once(
            listener,
            "HTTP/1.1 200 OK",
            r#"{"status":"ok","text":"clean outlines"}"#.to_string(),
        );
        let response = call_agent(&url, 2000, &request_fixture()).unwrap();
        assert_eq!(response.text.as_deref(), Some("clean outlines"));
        let request = seen.recv().unwrap();
        assert_eq!(request.agent, "shape-descriptor");
        assert_eq!(request.text["problem_statement"], "a calm logo");
    }

    #[test]
    fn error_status_in_body_is_an_error() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/agent", listener.local_addr().unwrap());
        let _seen = serve_once(
            listener,
            "HTTP/1.1 200 OK",
            r#"{"status":"error","message":"model overloaded"}"#.to_string(),
        );
        let err = call_agent(&url, 2000, &request_fixture()).unwrap_err();
        assert!(err.contains("model overloaded"), "{err}");
    }

    #[test]
    fn http_failure_and_bad_json_are_errors() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/agent", listener.local_addr().unwrap());
        let _seen = serve_once(listener, "HTTP/1.1 500 Internal Server Error", "{}".to_string());
        assert!(call_agent(&url, 2000, &request_fixture()).is_err());

        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/agent", listener.local_addr().unwrap());
        let _seen = serve_once(listener, "HTTP/1.1 200 OK", "not json".to_string());
        assert!(call_agent(&url, 2000, &request_fixture()).is_err());
    }

    #[test]
    fn refused_connection_is_a_transport_error() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/agent", listener.local_addr().unwrap());
        drop(listener);
        let err = call_agent(&url, 500, &request_fixture()).unwrap_err();
        assert!(err.contains("failed"), "{err}");
    }

    #[test]
    fn image_fields_round_trip_through_base64() {
        let mut rgb = RgbImage::new(5, 4);
        rgb.put_pixel(2, 1, image::Rgb([10, 200, 30]));
        let encoded = rgb_to_base64(&rgb);
        let back = base64_to_image(&encoded).unwrap().to_rgb8();
        assert_eq!(back, rgb);

        let mut gray = GrayImage::new(3, 3);
        gray.put_pixel(1, 1, image::Luma([77]));
        let encoded = gray_to_base64(&gray);
        let back = base64_to_image(&encoded).unwrap().to_luma8();
        assert_eq!(back, gray);

        assert!(base64_to_image("@@not-base64@@").is_err());
        let garbage = BASE64.encode(b"not a png");
        assert!(base64_to_image(&garbage).is_err());
    }

    #[test]
    fn missing_artifact_fields_are_named() {
        let response = AgentResponse {
            status: "ok".into(),
            text: None,
            image: None,
            message: None,
        };
        assert!(require_text(&response).unwrap_err().contains("text field"));
        assert!(require_image_gray(&response)
            .unwrap_err()
            .contains("image field"));
        assert!(require_image_rgb(&response)
            .unwrap_err()
            .contains("image field"));
    }
}
