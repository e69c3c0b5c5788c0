use super::Answer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParsedAnswer {
    Answer(Answer),
    Unparseable,
}

fn as_answer(word: &str) -> Option<Answer> {
    match word.to_lowercase().as_str() {
        "yes" => Some(Answer::Yes),
        "no" => Some(Answer::No),
        _ => None,
    }
}

/// Extracts a yes/no answer from free-form model output.
///
/// First looks for a leading "yes"/"no" on the first non-blank line, after
/// skipping punctuation and markup; then for the first standalone "yes" or
/// "no" word anywhere in the text.
pub fn parse_completion_answer(text: &str) -> ParsedAnswer {
    if let Some(first) = text.lines().find(|l| !l.trim().is_empty()) {
        let stripped = first.trim_start_matches(|c: char| !c.is_alphanumeric());
        let leading: String = stripped.chars().take_while(|c| c.is_alphanumeric()).collect();
        if let Some(answer) = as_answer(&leading) {
            return ParsedAnswer::Answer(answer);
        }
    }
    text.split(|c: char| !c.is_alphanumeric())
        .find_map(as_answer)
        .map_or(ParsedAnswer::Unparseable, ParsedAnswer::Answer)
}
