use serde::{Deserialize, Serialize};

use super::{NodeId, ProtocolError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    TeleportCorrection,
    GateTeleport,
    OneBitCorrection,
    SwapCorrection,
    GhzMerge,
    BlindAngle,
    BlindOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Message {
    pub seq: u64,
    pub from: NodeId,
    pub to: NodeId,
    /// Payload as a string of `0`/`1` characters.
    pub bits: String,
    pub purpose: Purpose,
}

/// Append-only log of covert classical messages and consumed Bell pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    messages: Vec<Message>,
    bell_pairs_consumed: u64,
    covert_bits: u64,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, from: NodeId, to: NodeId, bits: &[u8], purpose: Purpose) {
        let bits: String = bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect();
        self.covert_bits += bits.len() as u64;
        self.messages.push(Message { seq: self.messages.len() as u64, from, to, bits, purpose });
    }

    pub fn consume_pairs(&mut self, count: u64) {
        self.bell_pairs_consumed += count;
    }

    /// Append another run's messages after this one's.
    pub fn extend(&mut self, other: Transcript) {
        for m in other.messages {
            let seq = self.messages.len() as u64;
            self.covert_bits += m.bits.len() as u64;
            self.messages.push(Message { seq, ..m });
        }
        self.bell_pairs_consumed += other.bell_pairs_consumed;
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn bell_pairs_consumed(&self) -> u64 {
        self.bell_pairs_consumed
    }

    pub fn covert_bits(&self) -> u64 {
        self.covert_bits
    }

    /// One JSON object per line, fields `seq, from, to, bits, purpose`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&serde_json::to_string(m).expect("message serialises"));
            out.push('\n');
        }
        out
    }

    /// Parse a JSONL export. Pair consumption is not part of the format, so
    /// the result reports zero pairs.
    pub fn from_jsonl(text: &str) -> Result<Transcript, ProtocolError> {
        let mut t = Transcript::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let m: Message = serde_json::from_str(line)
                .map_err(|e| ProtocolError::TranscriptParse { line: line_no, reason: e.to_string() })?;
            if m.seq != t.messages.len() as u64 {
                return Err(ProtocolError::TranscriptParse {
                    line: line_no,
                    reason: format!("expected seq {}, found {}", t.messages.len(), m.seq),
                });
            }
            if m.bits.chars().any(|c| c != '0' && c != '1') {
                return Err(ProtocolError::TranscriptParse { line: line_no, reason: "bits must be 0/1".into() });
            }
            t.covert_bits += m.bits.len() as u64;
            t.messages.push(m);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_roundtrip() {
        let mut t = Transcript::new();
        t.send(NodeId(0), NodeId(1), &[1, 0], Purpose::TeleportCorrection);
        t.send(NodeId(1), NodeId(0), &[1], Purpose::GateTeleport);
        let text = t.to_jsonl();
        assert_eq!(text.lines().next().unwrap(), r#"{"seq":0,"from":0,"to":1,"bits":"10","purpose":"teleport_correction"}"#);
        let back = Transcript::from_jsonl(&text).unwrap();
        assert_eq!(back.messages(), t.messages());
        assert_eq!(back.covert_bits(), 3);
    }

    #[test]
    fn rejects_bad_lines() {
        let bad_seq = r#"{"seq":1,"from":0,"to":1,"bits":"1","purpose":"ghz_merge"}"#;
        assert!(matches!(Transcript::from_jsonl(bad_seq), Err(ProtocolError::TranscriptParse { line: 1, .. })));
        let bad_bits = r#"{"seq":0,"from":0,"to":1,"bits":"12","purpose":"ghz_merge"}"#;
        assert!(Transcript::from_jsonl(bad_bits).is_err());
        assert!(Transcript::from_jsonl("{").is_err());
    }

    #[test]
    fn extend_renumbers() {
        let mut a = Transcript::new();
        a.send(NodeId(0), NodeId(1), &[0, 0], Purpose::SwapCorrection);
        a.consume_pairs(2);
        let mut b = Transcript::new();
        b.send(NodeId(1), NodeId(2), &[1, 1], Purpose::SwapCorrection);
        b.consume_pairs(1);
        a.extend(b);
        assert_eq!(a.messages()[1].seq, 1);
        assert_eq!((a.covert_bits(), a.bell_pairs_consumed()), (4, 3));
    }
}
