//! Plaintext scorers used to pick the real password out of the padding-valid
//! candidates. Padding alone accepts about one wrong key in 255.

/// Candidates scoring at or above this are reported as plausible text.
pub const PLAUSIBLE_TEXT_THRESHOLD: f64 = 0.95;

pub trait PlaintextScorer: Send + Sync {
    /// A score in `[0, 1]`; higher means more plausible.
    fn score(&self, plaintext: &[u8]) -> f64;
    fn name(&self) -> String;
}

/// Fraction of bytes that are printable ASCII or tab/newline/carriage return.
/// Uniformly random bytes score about 98/256.
#[derive(Debug, Clone, Copy, Default)]
pub struct PrintableRatio;

impl PlaintextScorer for PrintableRatio {
    fn score(&self, plaintext: &[u8]) -> f64 {
        if plaintext.is_empty() {
            return 0.0;
        }
        let printable = plaintext.iter().filter(|&&b| matches!(b, 0x20..=0x7e | b'\t' | b'\n' | b'\r')).count();
        printable as f64 / plaintext.len() as f64
    }

    fn name(&self) -> String {
        "printable".into()
    }
}

/// 1.0 when the plaintext starts with a known file signature, else 0.0.
#[derive(Debug, Clone)]
pub struct MagicBytes {
    pub magic: Vec<u8>,
}

impl PlaintextScorer for MagicBytes {
    fn score(&self, plaintext: &[u8]) -> f64 {
        if plaintext.starts_with(&self.magic) {
            1.0
        } else {
            0.0
        }
    }

    fn name(&self) -> String {
        format!("magic:{}", hex::encode(&self.magic))
    }
}

/// `printable`, `magic:<hex>`, or one of the named signatures `pdf`, `png`,
/// `zip`, `jpeg`.
pub fn scorer_from_spec(spec: &str) -> Result<Box<dyn PlaintextScorer>, String> {
    let magic = |m: &[u8]| -> Box<dyn PlaintextScorer> { Box::new(MagicBytes { magic: m.to_vec() }) };
    Ok(match spec {
        "printable" => Box::new(PrintableRatio),
        "pdf" => magic(b"%PDF-"),
        "png" => magic(b"\x89PNG\r\n\x1a\n"),
        "zip" => magic(b"PK\x03\x04"),
        "jpeg" => magic(b"\xff\xd8\xff"),
        other => match other.strip_prefix("magic:") {
            Some(h) => magic(&hex::decode(h).map_err(|e| format!("bad magic hex: {e}"))?),
            None => return Err(format!("unknown heuristic {other:?}")),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printable_ratio() {
        assert_eq!(PrintableRatio.score(b"Hello,\nworld\t!"), 1.0);
        assert_eq!(PrintableRatio.score(&[0u8, 0x80, b'a', b'b']), 0.5);
        assert_eq!(PrintableRatio.score(b""), 0.0);
        let all: Vec<u8> = (0..=255).collect();
        assert!((PrintableRatio.score(&all) - 98.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn magic_specs() {
        let s = scorer_from_spec("pdf").unwrap();
        assert_eq!(s.score(b"%PDF-1.7 ..."), 1.0);
        assert_eq!(s.score(b"%PNG"), 0.0);
        assert_eq!(scorer_from_spec("magic:cafe").unwrap().score(&[0xca, 0xfe, 1]), 1.0);
        assert!(scorer_from_spec("magic:zz").is_err());
        assert!(scorer_from_spec("entropy").is_err());
    }
}
