/// Lowercases (Unicode-aware), collapses whitespace runs to one space and
/// trims both ends.
pub fn normalize_label(s: &str) -> String {
    let lower = s.to_lowercase();
    let mut out = String::with_capacity(lower.len());
    for word in lower.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(normalize_label("  Mixed  CASE "), "mixed case");
        assert_eq!(normalize_label("abc"), "abc");
        assert_eq!(normalize_label("Heart\tValve"), "heart valve");
        assert_eq!(normalize_label("\n \t"), "");
        assert_eq!(normalize_label("ÉCOLE\u{00a0}Normale"), "école normale");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,40}") {
            let once = normalize_label(&s);
            prop_assert_eq!(normalize_label(&once), once);
        }
    }
}
