//! Symbol type ids and their mapping to characters and byte encodings.
//!
//! A symbol type ("Latin h") is the same type no matter whether its bytes
//! were ASCII, Latin-1 or UTF-8; the tables here are the equivalence
//! classes that make decoding encoding-independent.

/// Symbol type id of the word separator emitted by arrangement analysis.
pub const SPACE_TYPE: &str = "SPACE";

/// The symbol type id for a character of the demo Latin repertoire.
pub fn type_id_for_char(c: char) -> Option<String> {
    Some(match c {
        'A'..='Z' => format!("LATIN_{c}_UPPER"),
        'a'..='z' => format!("LATIN_{}_LOWER", c.to_ascii_uppercase()),
        '0'..='9' => format!("DIGIT_{c}"),
        '.' => "PUNCT_PERIOD".to_string(),
        ',' => "PUNCT_COMMA".to_string(),
        ':' => "PUNCT_COLON".to_string(),
        ';' => "PUNCT_SEMICOLON".to_string(),
        '!' => "PUNCT_EXCLAIM".to_string(),
        '?' => "PUNCT_QUESTION".to_string(),
        '-' => "PUNCT_HYPHEN".to_string(),
        '\'' => "PUNCT_APOSTROPHE".to_string(),
        ' ' => SPACE_TYPE.to_string(),
        _ => return None,
    })
}

/// Inverse of [`type_id_for_char`].
pub fn char_for_type_id(id: &str) -> Option<char> {
    if let Some(rest) = id.strip_prefix("LATIN_") {
        let (letter, case) = rest.split_once('_')?;
        let c = letter.chars().next()?;
        if letter.len() != 1 || !c.is_ascii_uppercase() {
            return None;
        }
        return match case {
            "UPPER" => Some(c),
            "LOWER" => Some(c.to_ascii_lowercase()),
            _ => None,
        };
    }
    if let Some(d) = id.strip_prefix("DIGIT_") {
        let c = d.chars().next()?;
        return (d.len() == 1 && c.is_ascii_digit()).then_some(c);
    }
    Some(match id {
        "PUNCT_PERIOD" => '.',
        "PUNCT_COMMA" => ',',
        "PUNCT_COLON" => ':',
        "PUNCT_SEMICOLON" => ';',
        "PUNCT_EXCLAIM" => '!',
        "PUNCT_QUESTION" => '?',
        "PUNCT_HYPHEN" => '-',
        "PUNCT_APOSTROPHE" => '\'',
        SPACE_TYPE => ' ',
        _ => return None,
    })
}

/// Character set tags accepted on `text/plain` digital objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Charset {
    Ascii,
    Latin1,
    Utf8,
}

impl Charset {
    pub fn from_type_tag(tag: &str) -> Option<Charset> {
        match tag {
            "text/plain;charset=ascii" => Some(Charset::Ascii),
            "text/plain;charset=latin1" => Some(Charset::Latin1),
            "text/plain;charset=utf8" => Some(Charset::Utf8),
            _ => None,
        }
    }

    /// Decode bytes to characters; reports the byte offset of the first
    /// invalid sequence.
    pub fn decode(&self, bytes: &[u8]) -> Result<Vec<char>, usize> {
        match self {
            Charset::Ascii => bytes
                .iter()
                .enumerate()
                .map(|(i, &b)| if b < 0x80 { Ok(b as char) } else { Err(i) })
                .collect(),
            Charset::Latin1 => Ok(bytes.iter().map(|&b| b as char).collect()),
            Charset::Utf8 => match std::str::from_utf8(bytes) {
                Ok(s) => Ok(s.chars().collect()),
                Err(e) => Err(e.valid_up_to()),
            },
        }
    }
}
