//! Information formats: symbol type sets, fonts, arrangement rules and the
//! meaningful-feature flags that decide *which* information object a
//! carrier carries.

mod builtin;
pub mod encoding;
mod fontdata;
mod parser;

pub use builtin::builtin_registry;
pub use fontdata::{CELL_H, CELL_W};
pub use parser::{parse_definition, serialize_definition, FormatDefError};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::raster::{downscale, Bitmap};
use crate::structure::StyleAttrs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolType {
    pub id: String,
    pub display_name: String,
}

/// A finite set of mutually distinct symbol types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTypeSet {
    pub id: String,
    pub members: BTreeMap<String, SymbolType>,
}

impl SymbolTypeSet {
    pub fn new(id: impl Into<String>, members: Vec<SymbolType>) -> SymbolTypeSet {
        let id = id.into();
        let mut map = BTreeMap::new();
        for m in members {
            let prev = map.insert(m.id.clone(), m);
            assert!(prev.is_none(), "duplicate symbol type id in set");
        }
        assert!(!map.is_empty(), "symbol type set must be nonempty");
        SymbolTypeSet { id, members: map }
    }
}

/// Style transforms a font can express when rendering an occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StyleFlag {
    Bold,
    Italic,
    Underline,
}

impl StyleFlag {
    pub fn name(&self) -> &'static str {
        match self {
            StyleFlag::Bold => "bold",
            StyleFlag::Italic => "italic",
            StyleFlag::Underline => "underline",
        }
    }

    pub fn from_name(s: &str) -> Option<StyleFlag> {
        match s {
            "bold" => Some(StyleFlag::Bold),
            "italic" => Some(StyleFlag::Italic),
            "underline" => Some(StyleFlag::Underline),
            _ => None,
        }
    }
}

/// A symbol font: exactly one glyph bitmap per symbol type of every type
/// set it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolFont {
    pub id: String,
    pub type_set_ids: BTreeSet<String>,
    pub glyphs: BTreeMap<String, Bitmap>,
    pub styles: BTreeSet<StyleFlag>,
}

impl SymbolFont {
    /// The glyph for a type with a style transform applied.
    ///
    /// Bold widens each row by one pixel, italic shears the upper half by
    /// one pixel, underline fills the reserved bottom row. Bold and italic
    /// are mutually exclusive so that every (type, style) template stays
    /// distinguishable.
    pub fn styled_glyph(&self, type_id: &str, style: &RenderStyle) -> Option<Bitmap> {
        let base = self.glyphs.get(type_id)?;
        Some(apply_style(base, style))
    }
}

/// The subset of style attributes a font can act on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct RenderStyle {
    pub bold: bool,
    pub italic: bool,
    pub underline: bool,
}

impl RenderStyle {
    pub const PLAIN: RenderStyle = RenderStyle {
        bold: false,
        italic: false,
        underline: false,
    };

    /// All supported render variants: {plain, bold, italic} x underline.
    pub fn variants() -> impl Iterator<Item = RenderStyle> {
        [false, true].into_iter().flat_map(|underline| {
            [(false, false), (true, false), (false, true)]
                .into_iter()
                .map(move |(bold, italic)| RenderStyle {
                    bold,
                    italic,
                    underline,
                })
        })
    }

    pub fn apply_to(&self, attrs: &mut StyleAttrs) {
        attrs.bold = self.bold;
        attrs.italic = self.italic;
        attrs.underline = self.underline;
    }
}

fn apply_style(base: &Bitmap, style: &RenderStyle) -> Bitmap {
    let mut out = base.clone();
    if style.bold {
        let mut b = out.clone();
        for y in 0..out.height {
            for x in 1..out.width {
                if out.get(x - 1, y) {
                    b.set(x, y, true);
                }
            }
        }
        out = b;
    }
    if style.italic {
        let mut it = Bitmap::blank(out.width, out.height);
        let shear_rows = 4.min(out.height);
        for y in 0..out.height {
            let shift = if y < shear_rows { 1 } else { 0 };
            for x in 0..out.width {
                if out.get(x, y) && x + shift < out.width {
                    it.set(x + shift, y, true);
                }
            }
        }
        out = it;
    }
    if style.underline {
        let y = out.height - 1;
        for x in 0..out.width {
            out.set(x, y, true);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRightTopToBottom,
    Boustrophedon,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::LeftToRightTopToBottom => "left-to-right-top-to-bottom",
            Direction::Boustrophedon => "boustrophedon",
        }
    }
}

/// Rules that turn relative glyph positions into discrete semantic
/// relations: lines, word gaps, paragraph gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementRuleSet {
    pub id: String,
    pub direction: Direction,
    pub inter_glyph_gap_px: u32,
    pub inter_word_gap_min_px: u32,
    pub inter_line_gap_min_px: u32,
    pub paragraph_blank_lines: Option<u32>,
}

impl ArrangementRuleSet {
    pub fn check(&self) -> Result<(), FormatError> {
        if self.inter_word_gap_min_px <= self.inter_glyph_gap_px {
            return Err(FormatError::IllPosedRules(self.id.clone()));
        }
        if self.inter_word_gap_min_px < 1 || self.inter_line_gap_min_px < 1 {
            return Err(FormatError::IllPosedRules(self.id.clone()));
        }
        Ok(())
    }
}

/// Which rendering features carry meaning under a format.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MeaningfulFlags {
    pub font_family: bool,
    pub bold: bool,
    pub italic: bool,
    pub underline: bool,
    pub size_pt: bool,
    pub case_sensitive: bool,
    pub word_separators: bool,
    pub paragraphs: bool,
}

impl MeaningfulFlags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.bold {
            v.push("bold");
        }
        if self.case_sensitive {
            v.push("caseSensitive");
        }
        if self.font_family {
            v.push("fontFamily");
        }
        if self.italic {
            v.push("italic");
        }
        if self.paragraphs {
            v.push("paragraphs");
        }
        if self.size_pt {
            v.push("sizePt");
        }
        if self.underline {
            v.push("underline");
        }
        if self.word_separators {
            v.push("wordSeparators");
        }
        v
    }

    pub fn set(&mut self, name: &str) -> bool {
        match name {
            "bold" => self.bold = true,
            "caseSensitive" => self.case_sensitive = true,
            "fontFamily" => self.font_family = true,
            "italic" => self.italic = true,
            "paragraphs" => self.paragraphs = true,
            "sizePt" => self.size_pt = true,
            "underline" => self.underline = true,
            "wordSeparators" => self.word_separators = true,
            _ => return false,
        }
        true
    }

    /// Drop everything this format does not consider meaningful.
    pub fn filter_style(&self, style: &StyleAttrs) -> StyleAttrs {
        StyleAttrs {
            font_family: if self.font_family {
                style.font_family.clone()
            } else {
                None
            },
            bold: self.bold && style.bold,
            italic: self.italic && style.italic,
            underline: self.underline && style.underline,
            size_pt: if self.size_pt { style.size_pt } else { None },
        }
    }
}

/// Declares that several source types are one merged type (e.g. U and V
/// read as the single epigraphic type UV).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRule {
    pub sources: Vec<String>,
    pub merged: String,
}

/// How `digital_interpret` shapes the extracted structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StructureModel {
    /// Paragraph / line / word text structure.
    #[default]
    Text,
    /// DOM-shaped containers (HTML element tree).
    Dom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationFormat {
    pub id: String,
    pub type_sets: BTreeSet<String>,
    pub fonts: BTreeSet<String>,
    pub rules: String,
    pub meaningful: MeaningfulFlags,
    pub merged_types: Vec<MergeRule>,
    pub structure_model: StructureModel,
}

impl InformationFormat {
    /// Map a raw recognized/decoded type id through the merge rules.
    pub fn merge_type<'a>(&'a self, type_id: &'a str) -> &'a str {
        for rule in &self.merged_types {
            if rule.sources.iter().any(|s| s == type_id) {
                return &rule.merged;
            }
        }
        type_id
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("unknown format: {0}")]
    UnknownFormat(String),
    #[error("unknown font: {0}")]
    UnknownFont(String),
    #[error("unknown type set: {0}")]
    UnknownTypeSet(String),
    #[error("unknown rule set: {0}")]
    UnknownRules(String),
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("font {font} is missing a glyph for type {type_id}")]
    MissingGlyph { font: String, type_id: String },
    #[error("arrangement rules {0} are ill-posed (word gap must exceed glyph gap)")]
    IllPosedRules(String),
}

/// A recognition template: one (font, type, style) rendering.
#[derive(Debug, Clone)]
pub struct Template {
    pub font_id: String,
    pub type_id: String,
    pub style: RenderStyle,
    pub bitmap: Bitmap,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// (type id, set a, set b): the same type id appears in two of the
    /// format's type sets.
    pub disjointness_violations: Vec<(String, String, String)>,
    /// (font id, type a, type b): the two types' glyph patterns are
    /// identical at the checked resolution.
    pub collisions: Vec<(String, String, String)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.disjointness_violations.is_empty() && self.collisions.is_empty()
    }

    pub fn has_collision(&self, type_a: &str, type_b: &str) -> bool {
        self.collisions
            .iter()
            .any(|(_, a, b)| (a == type_a && b == type_b) || (a == type_b && b == type_a))
    }
}

/// Immutable-after-load registry of formats and their constituents.
#[derive(Debug, Clone, Default)]
pub struct FormatRegistry {
    pub type_sets: BTreeMap<String, SymbolTypeSet>,
    pub fonts: BTreeMap<String, SymbolFont>,
    pub rules: BTreeMap<String, ArrangementRuleSet>,
    pub formats: BTreeMap<String, InformationFormat>,
}

impl FormatRegistry {
    pub fn new() -> FormatRegistry {
        FormatRegistry::default()
    }

    pub fn add_type_set(&mut self, set: SymbolTypeSet) -> Result<(), FormatError> {
        if self.type_sets.contains_key(&set.id) {
            return Err(FormatError::DuplicateId(set.id));
        }
        self.type_sets.insert(set.id.clone(), set);
        Ok(())
    }

    pub fn add_font(&mut self, font: SymbolFont) -> Result<(), FormatError> {
        if self.fonts.contains_key(&font.id) {
            return Err(FormatError::DuplicateId(font.id));
        }
        for set_id in &font.type_set_ids {
            let set = self
                .type_sets
                .get(set_id)
                .ok_or_else(|| FormatError::UnknownTypeSet(set_id.clone()))?;
            for type_id in set.members.keys() {
                if !font.glyphs.contains_key(type_id) {
                    return Err(FormatError::MissingGlyph {
                        font: font.id.clone(),
                        type_id: type_id.clone(),
                    });
                }
            }
        }
        self.fonts.insert(font.id.clone(), font);
        Ok(())
    }

    pub fn add_rules(&mut self, rules: ArrangementRuleSet) -> Result<(), FormatError> {
        rules.check()?;
        if self.rules.contains_key(&rules.id) {
            return Err(FormatError::DuplicateId(rules.id));
        }
        self.rules.insert(rules.id.clone(), rules);
        Ok(())
    }

    pub fn add_format(&mut self, format: InformationFormat) -> Result<(), FormatError> {
        if self.formats.contains_key(&format.id) {
            return Err(FormatError::DuplicateId(format.id));
        }
        for set_id in &format.type_sets {
            if !self.type_sets.contains_key(set_id) {
                return Err(FormatError::UnknownTypeSet(set_id.clone()));
            }
        }
        for font_id in &format.fonts {
            if !self.fonts.contains_key(font_id) {
                return Err(FormatError::UnknownFont(font_id.clone()));
            }
        }
        if !self.rules.contains_key(&format.rules) {
            return Err(FormatError::UnknownRules(format.rules.clone()));
        }
        self.formats.insert(format.id.clone(), format);
        Ok(())
    }

    pub fn get_format(&self, id: &str) -> Result<&InformationFormat, FormatError> {
        self.formats
            .get(id)
            .ok_or_else(|| FormatError::UnknownFormat(id.to_string()))
    }

    pub fn get_font(&self, id: &str) -> Result<&SymbolFont, FormatError> {
        self.fonts
            .get(id)
            .ok_or_else(|| FormatError::UnknownFont(id.to_string()))
    }

    pub fn get_rules(&self, id: &str) -> Result<&ArrangementRuleSet, FormatError> {
        self.rules
            .get(id)
            .ok_or_else(|| FormatError::UnknownRules(id.to_string()))
    }

    pub fn rules_for_format(&self, format: &InformationFormat) -> &ArrangementRuleSet {
        &self.rules[&format.rules]
    }

    /// The effective alphabet of a format: all member type ids with merge
    /// rules applied (sources replaced by the merged type).
    pub fn alphabet(&self, format: &InformationFormat) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for set_id in &format.type_sets {
            if let Some(set) = self.type_sets.get(set_id) {
                for id in set.members.keys() {
                    out.insert(format.merge_type(id).to_string());
                }
            }
        }
        out
    }

    /// All (font, type, style) recognition templates for a format.
    pub fn templates(&self, format: &InformationFormat) -> Vec<Template> {
        let mut out = Vec::new();
        for font_id in &format.fonts {
            let font = &self.fonts[font_id];
            for type_id in font.glyphs.keys() {
                for style in RenderStyle::variants() {
                    if (style.bold && !font.styles.contains(&StyleFlag::Bold))
                        || (style.italic && !font.styles.contains(&StyleFlag::Italic))
                        || (style.underline && !font.styles.contains(&StyleFlag::Underline))
                    {
                        continue;
                    }
                    out.push(Template {
                        font_id: font_id.clone(),
                        type_id: type_id.clone(),
                        style,
                        bitmap: font.styled_glyph(type_id, &style).unwrap(),
                    });
                }
            }
        }
        out
    }

    /// Check type-set disjointness and glyph collisions.
    ///
    /// `at_resolution` is in pixels per em (one em = the glyph cell
    /// height); None checks at native resolution. Two types collide when
    /// their downscaled glyphs have identical ink patterns after cropping
    /// to the ink bounding box, which is exactly the condition under which
    /// recognition cannot tell them apart.
    pub fn validate_format(
        &self,
        format_id: &str,
        at_resolution: Option<u32>,
    ) -> Result<ValidationReport, FormatError> {
        let format = self.get_format(format_id)?;
        let mut report = ValidationReport::default();

        let sets: Vec<&SymbolTypeSet> = format
            .type_sets
            .iter()
            .filter_map(|id| self.type_sets.get(id))
            .collect();
        for (i, a) in sets.iter().enumerate() {
            for b in sets.iter().skip(i + 1) {
                for id in a.members.keys() {
                    if b.members.contains_key(id) {
                        report.disjointness_violations.push((
                            id.clone(),
                            a.id.clone(),
                            b.id.clone(),
                        ));
                    }
                }
            }
        }

        for font_id in &format.fonts {
            let font = &self.fonts[font_id];
            let patterns: Vec<(&String, Option<Bitmap>)> = font
                .glyphs
                .iter()
                .map(|(id, glyph)| (id, glyph_pattern(glyph, at_resolution)))
                .collect();
            for (i, (id_a, pat_a)) in patterns.iter().enumerate() {
                for (id_b, pat_b) in patterns.iter().skip(i + 1) {
                    if pat_a == pat_b {
                        report
                            .collisions
                            .push((font_id.clone(), (*id_a).clone(), (*id_b).clone()));
                    }
                }
            }
        }
        Ok(report)
    }
}

/// The cropped ink pattern of a glyph at a given resolution (pixels per
/// em); None when the glyph vanishes entirely.
pub fn glyph_pattern(glyph: &Bitmap, at_resolution: Option<u32>) -> Option<Bitmap> {
    match at_resolution {
        None => glyph.cropped(),
        Some(r) => {
            let th = r.max(1);
            let tw = ((glyph.width as u64 * th as u64 * 2 + glyph.height as u64)
                / (2 * glyph.height as u64))
                .max(1) as u32;
            downscale(glyph, tw, th).cropped()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> FormatRegistry {
        builtin_registry()
    }

    #[test]
    fn builtin_formats_resolve() {
        let reg = registry();
        for id in [
            "PLAIN_LATIN",
            "FONT_AWARE_LATIN",
            "LATIN_EPIGRAPHIC",
            "HTML_DOC",
        ] {
            reg.get_format(id).unwrap();
        }
        assert!(matches!(
            reg.get_format("nope"),
            Err(FormatError::UnknownFormat(_))
        ));
    }

    #[test]
    fn plain_latin_is_collision_free_at_native_resolution() {
        let reg = registry();
        let report = reg.validate_format("PLAIN_LATIN", None).unwrap();
        assert!(
            report.is_clean(),
            "unexpected collisions: {:?}",
            report.collisions
        );
    }

    /// Every (font, type, style) template must stay distinguishable at
    /// native resolution, otherwise recognition at scale 1 would report
    /// spurious ambiguity.
    #[test]
    fn templates_of_distinct_types_have_distinct_patterns() {
        let reg = registry();
        let format = reg.get_format("FONT_AWARE_LATIN").unwrap();
        let templates = reg.templates(format);
        let patterns: Vec<(usize, Option<Bitmap>)> = templates
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t.bitmap.cropped()))
            .collect();
        for (i, pat_a) in &patterns {
            for (j, pat_b) in patterns.iter().skip(i + 1) {
                if templates[*i].type_id != templates[*j].type_id && pat_a == pat_b {
                    panic!(
                        "template collision: {}:{}:{:?} vs {}:{}:{:?}",
                        templates[*i].font_id,
                        templates[*i].type_id,
                        templates[*i].style,
                        templates[*j].font_id,
                        templates[*j].type_id,
                        templates[*j].style,
                    );
                }
            }
        }
    }

    #[test]
    fn digit_one_and_lowercase_l_collide_below_five_px_per_em() {
        let reg = registry();
        let mut collide_at = Vec::new();
        for r in 1..=10 {
            let report = reg.validate_format("PLAIN_LATIN", Some(r)).unwrap();
            if report.has_collision("DIGIT_1", "LATIN_L_LOWER") {
                collide_at.push(r);
            }
        }
        // Threshold is 5 px/em; the pair must collide at every lower
        // resolution (monotonicity) and never at or above it.
        assert_eq!(collide_at, vec![1, 2, 3, 4]);
    }

    #[test]
    fn disjointness_violation_reported() {
        let mut reg = FormatRegistry::new();
        let t = |id: &str| SymbolType {
            id: id.into(),
            display_name: id.into(),
        };
        reg.add_type_set(SymbolTypeSet::new("s1", vec![t("A"), t("B")]))
            .unwrap();
        reg.add_type_set(SymbolTypeSet::new("s2", vec![t("A")]))
            .unwrap();
        let mut glyphs = BTreeMap::new();
        for id in ["A", "B"] {
            glyphs.insert(id.to_string(), Bitmap::parse(&["#"]));
        }
        reg.add_font(SymbolFont {
            id: "f".into(),
            type_set_ids: ["s1".to_string()].into(),
            glyphs,
            styles: BTreeSet::new(),
        })
        .unwrap();
        reg.add_rules(ArrangementRuleSet {
            id: "r".into(),
            direction: Direction::LeftToRightTopToBottom,
            inter_glyph_gap_px: 2,
            inter_word_gap_min_px: 6,
            inter_line_gap_min_px: 3,
            paragraph_blank_lines: Some(1),
        })
        .unwrap();
        reg.add_format(InformationFormat {
            id: "F".into(),
            type_sets: ["s1".to_string(), "s2".to_string()].into(),
            fonts: ["f".to_string()].into(),
            rules: "r".into(),
            meaningful: MeaningfulFlags::default(),
            merged_types: vec![],
            structure_model: StructureModel::Text,
        })
        .unwrap();
        let report = reg.validate_format("F", None).unwrap();
        assert_eq!(report.disjointness_violations.len(), 1);
        assert_eq!(report.disjointness_violations[0].0, "A");
    }

    #[test]
    fn epigraphic_alphabet_merges_u_and_v() {
        let reg = registry();
        let f = reg.get_format("LATIN_EPIGRAPHIC").unwrap();
        let alphabet = reg.alphabet(f);
        assert!(alphabet.contains("LATIN_UV_UPPER"));
        assert!(!alphabet.contains("LATIN_U_UPPER"));
        assert!(!alphabet.contains("LATIN_V_UPPER"));
    }
}
