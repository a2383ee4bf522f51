//! The formats shipped with the library.
//!
//! - `PLAIN_LATIN`: font-blind, case-sensitive; words and paragraphs are
//!   meaningful. The "plain language" reading of a page.
//! - `FONT_AWARE_LATIN`: like PLAIN_LATIN but font family, bold, italic
//!   and underline carry meaning.
//! - `LATIN_EPIGRAPHIC`: uppercase-only with U and V read as the single
//!   type UV; word separators meaningful.
//! - `HTML_DOC`: DOM-shaped structures from HTML digital objects; inline
//!   style tags and `href` carry meaning.

use std::collections::{BTreeMap, BTreeSet};

use super::encoding::type_id_for_char;
use super::fontdata::{BASE_GLYPHS, CELL_H, CELL_W};
use super::{
    ArrangementRuleSet, Direction, FormatRegistry, InformationFormat, MeaningfulFlags, MergeRule,
    StructureModel, StyleFlag, SymbolFont, SymbolType, SymbolTypeSet,
};
use crate::raster::Bitmap;

/// Family marker pixels on the reserved row 7, one pattern per family.
#[derive(Clone, Copy)]
struct Family {
    id: &'static str,
    marker_cols: &'static [u32],
}

const FAMILIES: &[Family] = &[
    Family {
        id: "demo_mono",
        marker_cols: &[],
    },
    Family {
        id: "demo_slab",
        marker_cols: &[0, 2],
    },
    Family {
        id: "demo_roman",
        marker_cols: &[1, 3],
    },
];

fn cell_glyph(rows5x7: &[&str; 7], marker_cols: &[u32]) -> Bitmap {
    let mut b = Bitmap::blank(CELL_W, CELL_H);
    for (y, row) in rows5x7.iter().enumerate() {
        for (x, c) in row.chars().enumerate() {
            if c == '#' {
                b.set(x as u32, y as u32, true);
            }
        }
    }
    for &col in marker_cols {
        b.set(col, 7, true);
    }
    b
}

fn symbol_type(c: char) -> SymbolType {
    SymbolType {
        id: type_id_for_char(c).unwrap(),
        display_name: c.to_string(),
    }
}

fn all_styles() -> BTreeSet<StyleFlag> {
    [StyleFlag::Bold, StyleFlag::Italic, StyleFlag::Underline].into()
}

/// Build the registry of built-in type sets, fonts, rules and formats.
pub fn builtin_registry() -> FormatRegistry {
    let mut reg = FormatRegistry::new();

    let letters: Vec<char> = ('A'..='Z').chain('a'..='z').collect();
    let uppers: Vec<char> = ('A'..='Z').collect();
    let digits: Vec<char> = ('0'..='9').collect();
    let punct: Vec<char> = vec!['.', ',', ':', ';', '!', '?', '-', '\''];

    reg.add_type_set(SymbolTypeSet::new(
        "latin_letters",
        letters.iter().copied().map(symbol_type).collect(),
    ))
    .unwrap();
    reg.add_type_set(SymbolTypeSet::new(
        "latin_upper",
        uppers.iter().copied().map(symbol_type).collect(),
    ))
    .unwrap();
    reg.add_type_set(SymbolTypeSet::new(
        "digits",
        digits.iter().copied().map(symbol_type).collect(),
    ))
    .unwrap();
    reg.add_type_set(SymbolTypeSet::new(
        "punct",
        punct.iter().copied().map(symbol_type).collect(),
    ))
    .unwrap();
    reg.add_type_set(SymbolTypeSet::new(
        "separators",
        vec![SymbolType {
            id: "SPACE".into(),
            display_name: " ".into(),
        }],
    ))
    .unwrap();

    let glyph_rows: BTreeMap<char, &[&str; 7]> =
        BASE_GLYPHS.iter().map(|(c, rows)| (*c, rows)).collect();

    for fam in FAMILIES {
        let mut glyphs = BTreeMap::new();
        for c in letters.iter().chain(digits.iter()).chain(punct.iter()) {
            let rows = glyph_rows
                .get(c)
                .unwrap_or_else(|| panic!("missing base glyph for {c:?}"));
            glyphs.insert(
                type_id_for_char(*c).unwrap(),
                cell_glyph(rows, fam.marker_cols),
            );
        }
        reg.add_font(SymbolFont {
            id: fam.id.to_string(),
            type_set_ids: ["latin_letters", "digits", "punct"]
                .map(String::from)
                .into(),
            glyphs,
            styles: all_styles(),
        })
        .unwrap();
    }

    // Uppercase-only font for the epigraphic format, same mono shapes.
    // The merged U/V type is written with the V shape, as on Roman stone.
    let mut caps_glyphs = BTreeMap::new();
    for c in &uppers {
        caps_glyphs.insert(
            type_id_for_char(*c).unwrap(),
            cell_glyph(glyph_rows[c], &[]),
        );
    }
    caps_glyphs.insert(
        "LATIN_UV_UPPER".to_string(),
        cell_glyph(glyph_rows[&'V'], &[]),
    );
    reg.add_font(SymbolFont {
        id: "epigraphic_mono".into(),
        type_set_ids: ["latin_upper".to_string()].into(),
        glyphs: caps_glyphs,
        styles: BTreeSet::new(),
    })
    .unwrap();

    reg.add_rules(ArrangementRuleSet {
        id: "ltr_default".into(),
        direction: Direction::LeftToRightTopToBottom,
        inter_glyph_gap_px: 2,
        inter_word_gap_min_px: 8,
        inter_line_gap_min_px: 4,
        paragraph_blank_lines: Some(1),
    })
    .unwrap();

    let demo_fonts: BTreeSet<String> = FAMILIES.iter().map(|f| f.id.to_string()).collect();
    let text_sets: BTreeSet<String> = ["latin_letters", "digits", "punct", "separators"]
        .map(String::from)
        .into();

    reg.add_format(InformationFormat {
        id: "PLAIN_LATIN".into(),
        type_sets: text_sets.clone(),
        fonts: demo_fonts.clone(),
        rules: "ltr_default".into(),
        meaningful: MeaningfulFlags {
            case_sensitive: true,
            word_separators: true,
            paragraphs: true,
            ..Default::default()
        },
        merged_types: vec![],
        structure_model: StructureModel::Text,
    })
    .unwrap();

    reg.add_format(InformationFormat {
        id: "FONT_AWARE_LATIN".into(),
        type_sets: text_sets.clone(),
        fonts: demo_fonts.clone(),
        rules: "ltr_default".into(),
        meaningful: MeaningfulFlags {
            font_family: true,
            bold: true,
            italic: true,
            underline: true,
            case_sensitive: true,
            word_separators: true,
            paragraphs: true,
            ..Default::default()
        },
        merged_types: vec![],
        structure_model: StructureModel::Text,
    })
    .unwrap();

    reg.add_format(InformationFormat {
        id: "LATIN_EPIGRAPHIC".into(),
        type_sets: ["latin_upper", "separators"].map(String::from).into(),
        fonts: ["epigraphic_mono".to_string()].into(),
        rules: "ltr_default".into(),
        meaningful: MeaningfulFlags {
            word_separators: true,
            ..Default::default()
        },
        merged_types: vec![MergeRule {
            sources: vec!["LATIN_U_UPPER".into(), "LATIN_V_UPPER".into()],
            merged: "LATIN_UV_UPPER".into(),
        }],
        structure_model: StructureModel::Text,
    })
    .unwrap();

    reg.add_format(InformationFormat {
        id: "HTML_DOC".into(),
        type_sets: text_sets,
        fonts: demo_fonts,
        rules: "ltr_default".into(),
        meaningful: MeaningfulFlags {
            bold: true,
            italic: true,
            underline: true,
            case_sensitive: true,
            word_separators: true,
            paragraphs: true,
            ..Default::default()
        },
        merged_types: vec![],
        structure_model: StructureModel::Dom,
    })
    .unwrap();

    reg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_font_covers_the_full_repertoire() {
        let reg = builtin_registry();
        for fam in FAMILIES {
            let font = reg.get_font(fam.id).unwrap();
            assert_eq!(font.glyphs.len(), 52 + 10 + 8);
            for g in font.glyphs.values() {
                assert_eq!((g.width, g.height), (CELL_W, CELL_H));
                assert!(!g.is_blank());
            }
        }
    }

    #[test]
    fn base_glyphs_have_no_wide_internal_blank_column_runs() {
        // Column-profile segmentation treats a blank run of two or more
        // columns as a glyph boundary, so no glyph may contain one.
        let reg = builtin_registry();
        let font = reg.get_font("demo_mono").unwrap();
        for (id, glyph) in &font.glyphs {
            let bounds = glyph.ink_bounds().unwrap();
            let mut run = 0u32;
            for x in bounds.x..bounds.x + bounds.w {
                let blank = (0..glyph.height).all(|y| !glyph.get(x, y));
                run = if blank { run + 1 } else { 0 };
                assert!(run < 2, "glyph {id} has an internal blank column run");
            }
        }
    }
}
