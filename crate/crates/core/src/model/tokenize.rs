/// Punctuation that is split off the edges of a whitespace chunk.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{201C}' | '\u{201D}' | '\u{2018}' | '\u{2019}' | '\u{00AB}' | '\u{00BB}' | '\u{2014}'
                | '\u{2013}' | '\u{2026}'
        )
}

/// Whitespace tokenizer that peels leading and trailing punctuation into
/// one-character tokens. Punctuation inside a chunk (`York-based`,
/// `court's`) stays attached.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let lead_end = chunk
            .char_indices()
            .find(|&(_, c)| !is_punctuation(c))
            .map_or(chunk.len(), |(i, _)| i);
        let (lead, rest) = chunk.split_at(lead_end);
        let trail_start = rest
            .char_indices()
            .rev()
            .find(|&(_, c)| !is_punctuation(c))
            .map_or(0, |(i, c)| i + c.len_utf8());
        let (core, trail) = rest.split_at(trail_start);

        tokens.extend(lead.chars().map(String::from));
        if !core.is_empty() {
            tokens.push(core.to_string());
        }
        tokens.extend(trail.chars().map(String::from));
    }
    tokens
}
