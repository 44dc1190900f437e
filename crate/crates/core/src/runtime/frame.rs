//! Wire framing: a 4-byte big-endian length followed by a UTF-8 JSON object.
//!
//! A truncated or oversized frame is fatal to the connection; there is no
//! resynchronisation.

use std::io::{self, Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub const MAX_FRAME_LEN: usize = 64 * 1024 * 1024;
const HEADER_LEN: usize = 4;

/// A framed JSON message whose kind is named by a discriminator field.
pub trait WireMessage: Serialize + DeserializeOwned {
    const TAG_FIELD: &'static str;
    const KINDS: &'static [&'static str];
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("truncated frame: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("frame of {0} bytes exceeds the {MAX_FRAME_LEN}-byte limit")]
    TooLarge(usize),
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("unknown {field} {kind:?}")]
    UnknownKind { field: &'static str, kind: String },
    #[error("field type mismatch: {0}")]
    FieldMismatch(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn frame_encode<M: Serialize>(message: &M) -> Result<Vec<u8>, FrameError> {
    let payload = serde_json::to_vec(message).map_err(|e| FrameError::Malformed(e.to_string()))?;
    if payload.len() > MAX_FRAME_LEN {
        return Err(FrameError::TooLarge(payload.len()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

fn parse_payload<M: WireMessage>(payload: &[u8]) -> Result<M, FrameError> {
    let text = std::str::from_utf8(payload).map_err(|e| FrameError::Malformed(e.to_string()))?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| FrameError::Malformed(e.to_string()))?;
    let kind = value
        .get(M::TAG_FIELD)
        .and_then(|v| v.as_str())
        .ok_or_else(|| FrameError::Malformed(format!("missing string field {:?}", M::TAG_FIELD)))?;
    if !M::KINDS.contains(&kind) {
        return Err(FrameError::UnknownKind { field: M::TAG_FIELD, kind: kind.to_owned() });
    }
    serde_json::from_value(value).map_err(|e| FrameError::FieldMismatch(e.to_string()))
}

fn declared_len(header: [u8; HEADER_LEN]) -> Result<usize, FrameError> {
    let len = u32::from_be_bytes(header) as usize;
    if len > MAX_FRAME_LEN {
        return Err(FrameError::TooLarge(len));
    }
    Ok(len)
}

/// Decodes one frame from the front of `bytes`, returning the message and the
/// number of bytes consumed.
pub fn frame_decode<M: WireMessage>(bytes: &[u8]) -> Result<(M, usize), FrameError> {
    if bytes.len() < HEADER_LEN {
        return Err(FrameError::Truncated { needed: HEADER_LEN, available: bytes.len() });
    }
    let len = declared_len(bytes[..HEADER_LEN].try_into().expect("4 bytes"))?;
    let end = HEADER_LEN + len;
    if bytes.len() < end {
        return Err(FrameError::Truncated { needed: end, available: bytes.len() });
    }
    Ok((parse_payload(&bytes[HEADER_LEN..end])?, end))
}

pub fn write_frame<W: Write, M: Serialize>(writer: &mut W, message: &M) -> Result<(), FrameError> {
    writer.write_all(&frame_encode(message)?)?;
    writer.flush()?;
    Ok(())
}

/// Reads one frame. `Ok(None)` means the peer closed cleanly between frames.
pub fn read_frame<R: Read, M: WireMessage>(reader: &mut R) -> Result<Option<M>, FrameError> {
    let mut header = [0u8; HEADER_LEN];
    let mut filled = 0;
    while filled < HEADER_LEN {
        match reader.read(&mut header[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(FrameError::Truncated { needed: HEADER_LEN, available: filled }),
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let len = declared_len(header)?;
    let mut payload = Vec::new();
    let got = reader.take(len as u64).read_to_end(&mut payload)?;
    if got < len {
        return Err(FrameError::Truncated { needed: HEADER_LEN + len, available: HEADER_LEN + got });
    }
    parse_payload(&payload).map(Some)
}
