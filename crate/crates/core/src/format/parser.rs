//! Concrete text syntax for format definitions.
//!
//! ```text
//! [typeset latin_letters]
//! member = LATIN_A_UPPER A
//!
//! [font demo_mono]
//! typesets = latin_letters
//! styles = bold, italic, underline
//! glyph LATIN_A_UPPER {
//! .###...
//! ...
//! }
//!
//! [rules ltr_default]
//! direction = left-to-right-top-to-bottom
//! inter_glyph_gap_px = 2
//! inter_word_gap_min_px = 6
//! inter_line_gap_min_px = 4
//! paragraph_blank_lines = 1
//!
//! [format PLAIN_LATIN]
//! typesets = latin_letters
//! fonts = demo_mono
//! rules = ltr_default
//! meaningful = caseSensitive, wordSeparators
//! merge = LATIN_U_UPPER, LATIN_V_UPPER -> LATIN_UV_UPPER
//! structure = text
//! ```
//!
//! Lines starting with `#` are comments. Unknown keys are rejected.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{
    ArrangementRuleSet, Direction, FormatError, FormatRegistry, InformationFormat, MeaningfulFlags,
    MergeRule, StructureModel, StyleFlag, SymbolFont, SymbolType, SymbolTypeSet,
};
use crate::raster::Bitmap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatDefError {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatDefError {
    FormatDefError::Syntax {
        line,
        msg: msg.into(),
    }
}

enum Section {
    None,
    TypeSet {
        id: String,
        members: Vec<SymbolType>,
    },
    Font {
        id: String,
        type_sets: BTreeSet<String>,
        styles: BTreeSet<StyleFlag>,
        glyphs: BTreeMap<String, Bitmap>,
    },
    Rules {
        id: String,
        direction: Option<Direction>,
        glyph_gap: Option<u32>,
        word_gap: Option<u32>,
        line_gap: Option<u32>,
        para_blank: Option<Option<u32>>,
    },
    Format {
        id: String,
        type_sets: BTreeSet<String>,
        fonts: BTreeSet<String>,
        rules: Option<String>,
        meaningful: MeaningfulFlags,
        merged: Vec<MergeRule>,
        model: StructureModel,
    },
}

fn flush(
    section: Section,
    line: usize,
    reg: &mut FormatRegistry,
) -> Result<Option<String>, FormatDefError> {
    match section {
        Section::None => Ok(None),
        Section::TypeSet { id, members } => {
            if members.is_empty() {
                return Err(syntax(line, format!("typeset {id} has no members")));
            }
            reg.add_type_set(SymbolTypeSet::new(id, members))?;
            Ok(None)
        }
        Section::Font {
            id,
            type_sets,
            styles,
            glyphs,
        } => {
            let font = SymbolFont {
                id,
                type_set_ids: type_sets,
                glyphs,
                styles,
            };
            reg.add_font(font).map_err(promote_unresolved)?;
            Ok(None)
        }
        Section::Rules {
            id,
            direction,
            glyph_gap,
            word_gap,
            line_gap,
            para_blank,
        } => {
            reg.add_rules(ArrangementRuleSet {
                id: id.clone(),
                direction: direction
                    .ok_or_else(|| syntax(line, format!("rules {id}: missing direction")))?,
                inter_glyph_gap_px: glyph_gap.ok_or_else(|| {
                    syntax(line, format!("rules {id}: missing inter_glyph_gap_px"))
                })?,
                inter_word_gap_min_px: word_gap.ok_or_else(|| {
                    syntax(line, format!("rules {id}: missing inter_word_gap_min_px"))
                })?,
                inter_line_gap_min_px: line_gap.ok_or_else(|| {
                    syntax(line, format!("rules {id}: missing inter_line_gap_min_px"))
                })?,
                paragraph_blank_lines: para_blank.unwrap_or(None),
            })?;
            Ok(None)
        }
        Section::Format {
            id,
            type_sets,
            fonts,
            rules,
            meaningful,
            merged,
            model,
        } => {
            let rules = rules.ok_or_else(|| syntax(line, format!("format {id}: missing rules")))?;
            reg.add_format(InformationFormat {
                id: id.clone(),
                type_sets,
                fonts,
                rules,
                meaningful,
                merged_types: merged,
                structure_model: model,
            })
            .map_err(promote_unresolved)?;
            Ok(Some(id))
        }
    }
}

fn promote_unresolved(e: FormatError) -> FormatDefError {
    match e {
        FormatError::UnknownTypeSet(n)
        | FormatError::UnknownFont(n)
        | FormatError::UnknownRules(n) => FormatDefError::UnresolvedReference(n),
        other => FormatDefError::Format(other),
    }
}

fn id_list(value: &str) -> BTreeSet<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parse a format-definition document into the registry; returns the ids
/// of the formats it declared.
pub fn parse_definition(
    text: &str,
    reg: &mut FormatRegistry,
) -> Result<Vec<String>, FormatDefError> {
    let mut section = Section::None;
    let mut formats = Vec::new();
    let mut lines = text.lines().enumerate().peekable();

    while let Some((idx, raw)) = lines.next() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }

        if let Some(header) = trimmed.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| syntax(lineno, "unterminated section header"))?;
            let (kind, id) = header
                .split_once(' ')
                .ok_or_else(|| syntax(lineno, "section header needs an id"))?;
            let id = id.trim().to_string();
            if id.is_empty() {
                return Err(syntax(lineno, "empty section id"));
            }
            if let Some(fid) = flush(section, lineno, reg)? {
                formats.push(fid);
            }
            section = match kind {
                "typeset" => Section::TypeSet {
                    id,
                    members: Vec::new(),
                },
                "font" => Section::Font {
                    id,
                    type_sets: BTreeSet::new(),
                    styles: BTreeSet::new(),
                    glyphs: BTreeMap::new(),
                },
                "rules" => Section::Rules {
                    id,
                    direction: None,
                    glyph_gap: None,
                    word_gap: None,
                    line_gap: None,
                    para_blank: None,
                },
                "format" => Section::Format {
                    id,
                    type_sets: BTreeSet::new(),
                    fonts: BTreeSet::new(),
                    rules: None,
                    meaningful: MeaningfulFlags::default(),
                    merged: Vec::new(),
                    model: StructureModel::Text,
                },
                other => return Err(syntax(lineno, format!("unknown section kind: {other}"))),
            };
            continue;
        }

        // Glyph bitmap block inside a font section.
        if let Some(rest) = trimmed.strip_prefix("glyph ") {
            let type_id = rest
                .strip_suffix('{')
                .map(str::trim)
                .ok_or_else(|| syntax(lineno, "glyph block must open with `{`"))?;
            let Section::Font { glyphs, .. } = &mut section else {
                return Err(syntax(lineno, "glyph block outside a font section"));
            };
            let mut rows: Vec<String> = Vec::new();
            loop {
                let Some((ridx, rraw)) = lines.next() else {
                    return Err(syntax(lineno, "unterminated glyph block"));
                };
                let r = rraw.trim();
                if r == "}" {
                    break;
                }
                if r.is_empty() || r.chars().any(|c| c != '.' && c != '#') {
                    return Err(syntax(ridx + 1, "glyph rows must consist of `.` and `#`"));
                }
                rows.push(r.to_string());
            }
            if rows.is_empty() {
                return Err(syntax(lineno, "empty glyph block"));
            }
            let width = rows[0].len();
            if rows.iter().any(|r| r.len() != width) {
                return Err(syntax(lineno, "ragged glyph rows"));
            }
            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
            if glyphs
                .insert(type_id.to_string(), Bitmap::parse(&refs))
                .is_some()
            {
                return Err(syntax(lineno, format!("duplicate glyph for {type_id}")));
            }
            continue;
        }

        let (key, value) = trimmed
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| syntax(lineno, "expected `key = value`"))?;

        match &mut section {
            Section::None => return Err(syntax(lineno, "key-value line before any section")),
            Section::TypeSet { members, .. } => match key {
                "member" => {
                    let (tid, display) = value
                        .split_once(' ')
                        .ok_or_else(|| syntax(lineno, "member needs `<typeId> <displayName>`"))?;
                    let display = display.trim_start();
                    // Display names with whitespace are written quoted.
                    let display = match display.strip_prefix('"') {
                        Some(rest) => rest
                            .strip_suffix('"')
                            .ok_or_else(|| syntax(lineno, "unterminated quoted display name"))?
                            .to_string(),
                        None => display.trim_end().to_string(),
                    };
                    members.push(SymbolType {
                        id: tid.trim().to_string(),
                        display_name: display,
                    });
                }
                other => return Err(syntax(lineno, format!("unknown typeset key: {other}"))),
            },
            Section::Font {
                type_sets, styles, ..
            } => match key {
                "typesets" => *type_sets = id_list(value),
                "styles" => {
                    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let flag = StyleFlag::from_name(name)
                            .ok_or_else(|| syntax(lineno, format!("unknown style: {name}")))?;
                        styles.insert(flag);
                    }
                }
                other => return Err(syntax(lineno, format!("unknown font key: {other}"))),
            },
            Section::Rules {
                direction,
                glyph_gap,
                word_gap,
                line_gap,
                para_blank,
                ..
            } => {
                let parse_u32 = |v: &str| {
                    v.parse::<u32>()
                        .map_err(|_| syntax(lineno, format!("invalid number: {v}")))
                };
                match key {
                    "direction" => {
                        *direction = Some(match value {
                            "left-to-right-top-to-bottom" => Direction::LeftToRightTopToBottom,
                            "boustrophedon" => Direction::Boustrophedon,
                            other => {
                                return Err(syntax(lineno, format!("unknown direction: {other}")))
                            }
                        })
                    }
                    "inter_glyph_gap_px" => *glyph_gap = Some(parse_u32(value)?),
                    "inter_word_gap_min_px" => *word_gap = Some(parse_u32(value)?),
                    "inter_line_gap_min_px" => *line_gap = Some(parse_u32(value)?),
                    "paragraph_blank_lines" => {
                        *para_blank = Some(if value == "none" {
                            None
                        } else {
                            Some(parse_u32(value)?)
                        })
                    }
                    other => return Err(syntax(lineno, format!("unknown rules key: {other}"))),
                }
            }
            Section::Format {
                type_sets,
                fonts,
                rules,
                meaningful,
                merged,
                model,
                ..
            } => match key {
                "typesets" => *type_sets = id_list(value),
                "fonts" => *fonts = id_list(value),
                "rules" => *rules = Some(value.to_string()),
                "meaningful" => {
                    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        if !meaningful.set(name) {
                            return Err(syntax(lineno, format!("unknown meaningful flag: {name}")));
                        }
                    }
                }
                "merge" => {
                    let (srcs, dst) = value
                        .split_once("->")
                        .ok_or_else(|| syntax(lineno, "merge needs `a, b -> merged`"))?;
                    let sources: Vec<String> = srcs
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect();
                    if sources.is_empty() {
                        return Err(syntax(lineno, "merge needs at least one source"));
                    }
                    merged.push(MergeRule {
                        sources,
                        merged: dst.trim().to_string(),
                    });
                }
                "structure" => {
                    *model = match value {
                        "text" => StructureModel::Text,
                        "dom" => StructureModel::Dom,
                        other => {
                            return Err(syntax(lineno, format!("unknown structure model: {other}")))
                        }
                    }
                }
                other => return Err(syntax(lineno, format!("unknown format key: {other}"))),
            },
        }
    }

    let last = text.lines().count();
    if let Some(fid) = flush(section, last, reg)? {
        formats.push(fid);
    }
    Ok(formats)
}

/// Serialize a format and all its constituents back to definition text.
/// `parse_definition(serialize_definition(reg, id))` reproduces the same
/// entities field by field.
pub fn serialize_definition(reg: &FormatRegistry, format_id: &str) -> Result<String, FormatError> {
    let format = reg.get_format(format_id)?;
    let mut out = String::new();

    for set_id in &format.type_sets {
        let set = &reg.type_sets[set_id];
        out.push_str(&format!("[typeset {}]\n", set.id));
        for m in set.members.values() {
            let needs_quotes =
                m.display_name.is_empty() || m.display_name.chars().any(char::is_whitespace);
            if needs_quotes {
                out.push_str(&format!("member = {} \"{}\"\n", m.id, m.display_name));
            } else {
                out.push_str(&format!("member = {} {}\n", m.id, m.display_name));
            }
        }
        out.push('\n');
    }

    for font_id in &format.fonts {
        let font = &reg.fonts[font_id];
        out.push_str(&format!("[font {}]\n", font.id));
        let sets: Vec<&str> = font.type_set_ids.iter().map(String::as_str).collect();
        out.push_str(&format!("typesets = {}\n", sets.join(", ")));
        if !font.styles.is_empty() {
            let styles: Vec<&str> = font.styles.iter().map(|s| s.name()).collect();
            out.push_str(&format!("styles = {}\n", styles.join(", ")));
        }
        for (tid, glyph) in &font.glyphs {
            out.push_str(&format!("glyph {tid} {{\n"));
            for row in glyph.render_rows() {
                out.push_str(&row);
                out.push('\n');
            }
            out.push_str("}\n");
        }
        out.push('\n');
    }

    let rules = &reg.rules[&format.rules];
    out.push_str(&format!("[rules {}]\n", rules.id));
    out.push_str(&format!("direction = {}\n", rules.direction.name()));
    out.push_str(&format!(
        "inter_glyph_gap_px = {}\n",
        rules.inter_glyph_gap_px
    ));
    out.push_str(&format!(
        "inter_word_gap_min_px = {}\n",
        rules.inter_word_gap_min_px
    ));
    out.push_str(&format!(
        "inter_line_gap_min_px = {}\n",
        rules.inter_line_gap_min_px
    ));
    match rules.paragraph_blank_lines {
        Some(n) => out.push_str(&format!("paragraph_blank_lines = {n}\n")),
        None => out.push_str("paragraph_blank_lines = none\n"),
    }
    out.push('\n');

    out.push_str(&format!("[format {}]\n", format.id));
    let sets: Vec<&str> = format.type_sets.iter().map(String::as_str).collect();
    out.push_str(&format!("typesets = {}\n", sets.join(", ")));
    let fonts: Vec<&str> = format.fonts.iter().map(String::as_str).collect();
    out.push_str(&format!("fonts = {}\n", fonts.join(", ")));
    out.push_str(&format!("rules = {}\n", format.rules));
    let flags = format.meaningful.names();
    if !flags.is_empty() {
        out.push_str(&format!("meaningful = {}\n", flags.join(", ")));
    }
    for rule in &format.merged_types {
        out.push_str(&format!(
            "merge = {} -> {}\n",
            rule.sources.join(", "),
            rule.merged
        ));
    }
    if format.structure_model == StructureModel::Dom {
        out.push_str("structure = dom\n");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::builtin_registry;

    #[test]
    fn builtin_definitions_round_trip() {
        let reg = builtin_registry();
        for id in [
            "PLAIN_LATIN",
            "FONT_AWARE_LATIN",
            "LATIN_EPIGRAPHIC",
            "HTML_DOC",
        ] {
            let text = serialize_definition(&reg, id).unwrap();
            let mut fresh = FormatRegistry::new();
            let parsed = parse_definition(&text, &mut fresh).unwrap();
            assert_eq!(parsed, vec![id.to_string()]);
            let orig = reg.get_format(id).unwrap();
            let round = fresh.get_format(id).unwrap();
            assert_eq!(orig, round);
            for set_id in &orig.type_sets {
                assert_eq!(reg.type_sets[set_id], fresh.type_sets[set_id]);
            }
            for font_id in &orig.fonts {
                assert_eq!(reg.fonts[font_id], fresh.fonts[font_id]);
            }
            assert_eq!(reg.rules[&orig.rules], fresh.rules[&round.rules]);
        }
    }

    #[test]
    fn undeclared_font_is_unresolved_reference() {
        let text = "\
[typeset t]
member = A A

[rules r]
direction = left-to-right-top-to-bottom
inter_glyph_gap_px = 2
inter_word_gap_min_px = 6
inter_line_gap_min_px = 4

[format F]
typesets = t
fonts = ghost
rules = r
";
        let mut reg = FormatRegistry::new();
        let err = parse_definition(text, &mut reg).unwrap_err();
        assert_eq!(err, FormatDefError::UnresolvedReference("ghost".into()));
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let text = "[typeset t]\nbogus = 1\n";
        let mut reg = FormatRegistry::new();
        match parse_definition(text, &mut reg) {
            Err(FormatDefError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn hand_written_definition_parses_field_by_field() {
        let text = "\
# tiny two-letter format
[typeset ab]
member = A A
member = B B

[font f]
typesets = ab
glyph A {
#.#
.#.
#.#
}
glyph B {
###
#.#
###
}

[rules r]
direction = boustrophedon
inter_glyph_gap_px = 1
inter_word_gap_min_px = 3
inter_line_gap_min_px = 2
paragraph_blank_lines = none

[format TINY]
typesets = ab
fonts = f
rules = r
meaningful = caseSensitive
merge = A, B -> AB
";
        let mut reg = FormatRegistry::new();
        let ids = parse_definition(text, &mut reg).unwrap();
        assert_eq!(ids, vec!["TINY".to_string()]);
        let f = reg.get_format("TINY").unwrap();
        assert!(f.meaningful.case_sensitive);
        assert!(!f.meaningful.word_separators);
        assert_eq!(f.merged_types.len(), 1);
        assert_eq!(f.merge_type("A"), "AB");
        let rules = reg.get_rules("r").unwrap();
        assert_eq!(rules.direction, Direction::Boustrophedon);
        assert_eq!(rules.paragraph_blank_lines, None);
        let font = reg.get_font("f").unwrap();
        assert_eq!(font.glyphs["A"].ink_count(), 5);
    }
}
