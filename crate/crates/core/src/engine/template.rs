use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("missing binding for placeholder ${0}$")]
    MissingBinding(String),
}

/// A prompt body with `$NAME$` placeholders.
///
/// Placeholder names are runs of `[A-Z0-9_]` between two dollar signs. Any
/// other use of `$` is left alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    body: String,
    required: BTreeSet<String>,
}

impl PromptTemplate {
    pub fn new(body: impl Into<String>) -> Self {
        let body = body.into();
        let required = scan(&body).into_iter().map(|(_, _, name)| name.to_string()).collect();
        PromptTemplate { body, required }
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn required_placeholders(&self) -> &BTreeSet<String> {
        &self.required
    }

    pub fn render(&self, bindings: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
        render_template(self, bindings)
    }
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_uppercase() || b.is_ascii_digit() || b == b'_'
}

/// Returns `(start, end, name)` for each placeholder, `end` exclusive.
fn scan(body: &str) -> Vec<(usize, usize, &str)> {
    let bytes = body.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'$' {
            let mut j = i + 1;
            while j < bytes.len() && is_name_byte(bytes[j]) {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] == b'$' {
                out.push((i, j + 1, &body[i + 1..j]));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

pub fn render_template(template: &PromptTemplate, bindings: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
    if let Some(missing) = template.required.iter().find(|n| !bindings.contains_key(n.as_str())) {
        return Err(TemplateError::MissingBinding(missing.clone()));
    }
    let body = &template.body;
    let mut out = String::with_capacity(body.len());
    let mut last = 0;
    for (start, end, name) in scan(body) {
        out.push_str(&body[last..start]);
        out.push_str(&bindings[name]);
        last = end;
    }
    out.push_str(&body[last..]);
    Ok(out)
}

/// Convenience for call sites with a handful of bindings.
pub fn fill(template: &PromptTemplate, pairs: &[(&str, &str)]) -> Result<String, TemplateError> {
    let map = pairs.iter().map(|(k, v)| (*k, v.to_string())).collect();
    render_template(template, &map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn substitutes_number_of_tries() {
        let t = PromptTemplate::new("You lose when you cannot guess it in $N$ tries.");
        assert_eq!(fill(&t, &[("N", "3")]).unwrap(), "You lose when you cannot guess it in 3 tries.");
    }

    #[test]
    fn no_placeholders_is_identity() {
        let t = PromptTemplate::new("plain text, costs $5 and 10$");
        assert!(t.required_placeholders().is_empty());
        assert_eq!(fill(&t, &[]).unwrap(), "plain text, costs $5 and 10$");
    }

    #[test]
    fn missing_binding_is_reported() {
        let t = PromptTemplate::new("$TARGET_WORD$");
        assert_eq!(fill(&t, &[]), Err(TemplateError::MissingBinding("TARGET_WORD".into())));
    }

    #[test]
    fn repeated_placeholder_replaced_everywhere() {
        let t = PromptTemplate::new("$A$-$A$-$B$");
        assert_eq!(fill(&t, &[("A", "x"), ("B", "y")]).unwrap(), "x-x-y");
    }

    #[test]
    fn binding_values_are_not_rescanned() {
        let t = PromptTemplate::new("[$A$]");
        assert_eq!(fill(&t, &[("A", "$B$")]).unwrap(), "[$B$]");
    }

    proptest! {
        #[test]
        fn complete_bindings_leave_no_placeholder(
            parts in proptest::collection::vec("[a-z ,.]{0,8}", 1..6),
            names in proptest::collection::vec("[A-Z][A-Z_]{0,6}", 1..6),
            value in "[a-z ]{0,10}",
        ) {
            let mut body = String::new();
            for (i, p) in parts.iter().enumerate() {
                body.push_str(p);
                body.push('$');
                body.push_str(&names[i % names.len()]);
                body.push('$');
            }
            let t = PromptTemplate::new(body);
            let map = t.required_placeholders().iter().map(|n| (n.as_str(), value.clone())).collect();
            let out = render_template(&t, &map).unwrap();
            prop_assert!(scan(&out).is_empty());
        }
    }
}
