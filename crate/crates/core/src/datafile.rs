//! Versioned JSON data files carrying a SHA-256 checksum of their own
//! canonical form (keys sorted, compact, checksum field blanked).

use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn compute_checksum(doc: &Value) -> String {
    let mut doc = doc.clone();
    if let Some(obj) = doc.as_object_mut() {
        obj.insert("checksum".into(), Value::String(String::new()));
    }
    let canon = serde_json::to_vec(&doc).expect("json value serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(&canon)))
}

/// Parses a data file and checks its embedded checksum.
pub fn load_checked(bytes: &[u8]) -> Result<Value, String> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| format!("invalid data file: {e}"))?;
    let stated = doc
        .get("checksum")
        .and_then(Value::as_str)
        .ok_or_else(|| "data file lacks a checksum".to_string())?;
    let actual = compute_checksum(&doc);
    if stated != actual {
        return Err(format!("checksum mismatch: file states {stated}, content hashes to {actual}"));
    }
    Ok(doc)
}
