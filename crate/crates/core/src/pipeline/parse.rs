//! Lenient parsing of model responses.
//!
//! Models frequently wrap the requested JSON in prose or code fences, so
//! parsing falls back to the outermost bracketed slice before giving up.

use serde_json::Value;

/// Try the whole response as JSON, then the outermost `[...]` and `{...}`
/// slices.
pub fn extract_json(text: &str) -> Option<Value> {
    let trimmed = text.trim();
    if let Ok(v) = serde_json::from_str::<Value>(trimmed) {
        return Some(v);
    }
    for (open, close) in [('[', ']'), ('{', '}')] {
        if let (Some(start), Some(end)) = (trimmed.find(open), trimmed.rfind(close)) {
            if start < end {
                if let Ok(v) = serde_json::from_str::<Value>(&trimmed[start..=end]) {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Parse a response expected to be a JSON array of strings.
pub fn parse_string_array(text: &str) -> Option<Vec<String>> {
    let value = extract_json(text)?;
    let items = value.as_array()?;
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        out.push(item.as_str()?.to_string());
    }
    Some(out)
}

/// Parse a response expected to be a list of ids, either bare
/// (`[0, 2]`) or wrapped (`{"selected": [0, 2]}`).
pub fn parse_id_list(text: &str) -> Option<Vec<usize>> {
    let value = extract_json(text)?;
    let array = match &value {
        Value::Array(a) => a.clone(),
        Value::Object(o) => o.get("selected")?.as_array()?.clone(),
        _ => return None,
    };
    let mut out = Vec::with_capacity(array.len());
    for item in array {
        out.push(item.as_u64()? as usize);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_wrapped_json() {
        assert_eq!(
            parse_string_array(r#"["a","b"]"#),
            Some(vec!["a".to_string(), "b".to_string()])
        );
        assert_eq!(
            parse_string_array("Here you go:\n```json\n[\"a\"]\n```"),
            Some(vec!["a".to_string()])
        );
        assert_eq!(parse_string_array("no json here"), None);
        assert_eq!(parse_string_array(r#"[1, 2]"#), None);
    }

    #[test]
    fn parses_id_lists_in_both_shapes() {
        assert_eq!(parse_id_list("[0, 2]"), Some(vec![0, 2]));
        assert_eq!(parse_id_list(r#"{"selected": [1]}"#), Some(vec![1]));
        assert_eq!(parse_id_list(r#"{"other": [1]}"#), None);
        assert_eq!(parse_id_list("pick them all"), None);
    }

    #[test]
    fn object_slice_recovered_from_prose() {
        let v = extract_json("Sure! {\"choice\": \"B\"} hope that helps").unwrap();
        assert_eq!(v["choice"], "B");
    }
}
