//! Extracting symbol structures from sensory impressions (OCR-style) and
//! from digital objects directly.

pub mod html;

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::format::encoding::{type_id_for_char, Charset, SPACE_TYPE};
use crate::format::{FormatError, FormatRegistry, InformationFormat, RenderStyle, StructureModel};
use crate::raster::{downscale_by, Bitmap, Rect};
use crate::structure::{
    AnalogPart, Container, Node, StyleAttrs, SymbolOccurrence, SymbolStructure, Symbols,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpretError {
    #[error("format {0} is not discrete (no type sets or fonts)")]
    NotDiscreteFormat(String),
    #[error("unsupported type tag: {0}")]
    UnsupportedType(String),
    #[error("invalid byte sequence at offset {offset}")]
    DecodeError { offset: usize },
    #[error("symbol {0:?} has no type in the format's repertoire")]
    UnmappedSymbol(char),
    #[error("HTML parse error at line {line}: {msg}")]
    HtmlParseError { line: usize, msg: String },
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// How a glyph box relates to what precedes it in reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GapClass {
    IntraWord,
    InterWord,
    LineBreak,
    ParagraphBreak,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangedLine {
    pub baseline_y: u32,
    /// Boxes in reading order; the gap class describes the gap before
    /// each box (the first box carries the line- or paragraph-break).
    pub boxes: Vec<(Rect, GapClass)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolArrangement {
    pub lines: Vec<ArrangedLine>,
}

/// Find text lines and glyph boxes in an impression by row and column
/// projection profiles, classifying the gaps between them.
pub fn segment(
    impression: &crate::projection::SensoryImpression,
    rules: &crate::format::ArrangementRuleSet,
) -> SymbolArrangement {
    let bitmap = impression.to_bitmap();
    let s = impression.scale;
    let line_thr = s.len(rules.inter_line_gap_min_px);
    let glyph_thr = s.len(rules.inter_glyph_gap_px).max(1);
    // Word gaps are at least glyph gap + word gap wide on the carrier,
    // while intra-word gaps stay below glyph gap + internal cell padding;
    // the midpoint separates the two bands.
    let word_thr = s.len(rules.inter_glyph_gap_px + rules.inter_word_gap_min_px - 1);

    let ink_row: Vec<bool> = (0..bitmap.height)
        .map(|y| (0..bitmap.width).any(|x| bitmap.get(x, y)))
        .collect();

    // Bands of ink rows; a blank run shorter than the line gap stays
    // inside one band (glyphs may have internal blank rows).
    let mut bands: Vec<(u32, u32, u32)> = Vec::new(); // (y0, y1, blank rows before)
    let mut y = 0u32;
    let mut prev_end = 0u32;
    while y < bitmap.height {
        if !ink_row[y as usize] {
            y += 1;
            continue;
        }
        let y0 = y;
        let mut last_ink = y;
        while y < bitmap.height {
            if ink_row[y as usize] {
                last_ink = y;
                y += 1;
            } else {
                let run_start = y;
                while y < bitmap.height && !ink_row[y as usize] {
                    y += 1;
                }
                if y - run_start >= line_thr || y >= bitmap.height {
                    break;
                }
            }
        }
        bands.push((y0, last_ink + 1, y0 - prev_end));
        prev_end = last_ink + 1;
        y = last_ink + 1;
    }

    let max_band_h = bands.iter().map(|(y0, y1, _)| y1 - y0).max().unwrap_or(0);
    let para_thr = line_thr + max_band_h + 1;

    let mut out = SymbolArrangement::default();
    for (li, &(y0, y1, gap_before)) in bands.iter().enumerate() {
        let line_class = if li == 0 {
            GapClass::LineBreak
        } else if rules.paragraph_blank_lines.is_some() && gap_before >= para_thr {
            GapClass::ParagraphBreak
        } else {
            GapClass::LineBreak
        };

        let ink_col: Vec<bool> = (0..bitmap.width)
            .map(|x| (y0..y1).any(|y| bitmap.get(x, y)))
            .collect();
        let mut cols: Vec<(u32, u32, u32)> = Vec::new(); // (x0, x1, blank before)
        let mut x = 0u32;
        let mut prev_x = 0u32;
        while x < bitmap.width {
            if !ink_col[x as usize] {
                x += 1;
                continue;
            }
            let x0 = x;
            let mut last_ink = x;
            while x < bitmap.width {
                if ink_col[x as usize] {
                    last_ink = x;
                    x += 1;
                } else {
                    let run_start = x;
                    while x < bitmap.width && !ink_col[x as usize] {
                        x += 1;
                    }
                    if x - run_start >= glyph_thr || x >= bitmap.width {
                        break;
                    }
                }
            }
            cols.push((x0, last_ink + 1, x0 - prev_x));
            prev_x = last_ink + 1;
            x = last_ink + 1;
        }

        let mut boxes: Vec<(Rect, GapClass)> = Vec::new();
        for (bi, &(x0, x1, blank)) in cols.iter().enumerate() {
            // Tight ink bounding box within the band.
            let region = Rect::new(x0, y0, x1 - x0, y1 - y0);
            let tight = bitmap
                .crop(&region)
                .ink_bounds()
                .map(|r| Rect::new(region.x + r.x, region.y + r.y, r.w, r.h))
                .unwrap_or(region);
            let class = if bi == 0 {
                line_class
            } else if blank >= word_thr {
                GapClass::InterWord
            } else {
                GapClass::IntraWord
            };
            boxes.push((tight, class));
        }

        if rules.direction == crate::format::Direction::Boustrophedon && li % 2 == 1 {
            // Reading order runs right to left; the gap before a box in
            // reading order is the gap after it geometrically.
            let rects: Vec<Rect> = boxes.iter().rev().map(|(r, _)| *r).collect();
            let mut classes = vec![line_class];
            for w in boxes.windows(2).rev() {
                classes.push(w[1].1.min(GapClass::InterWord));
            }
            boxes = rects.into_iter().zip(classes).collect();
        }

        if !boxes.is_empty() {
            out.lines.push(ArrangedLine {
                baseline_y: y1 - 1,
                boxes,
            });
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn map_boxes<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_boxes<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}

struct PatternTemplate {
    font_id: String,
    type_id: String,
    style: RenderStyle,
    pattern: Bitmap,
}

/// Fold a lowercase Latin type id to its uppercase counterpart.
fn fold_case(type_id: &str) -> String {
    match type_id.strip_suffix("_LOWER") {
        Some(stem) if stem.starts_with("LATIN_") => format!("{stem}_UPPER"),
        _ => type_id.to_string(),
    }
}

fn normalize_type(format: &InformationFormat, type_id: &str) -> String {
    let folded = if format.meaningful.case_sensitive {
        type_id.to_string()
    } else {
        fold_case(type_id)
    };
    format.merge_type(&folded).to_string()
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

enum BoxResult {
    Occ(SymbolOccurrence),
    Analog(AnalogPart),
}

/// Recognize the symbol structure on an impression under a format.
///
/// Template matching is exact: a box matches a (font, type, style)
/// template when its cropped ink pattern equals the template's pattern at
/// the impression's scale. Several matching types form a systematic
/// ambiguity set; no match at all is an undefined occurrence, unless the
/// box is far larger than any glyph, in which case it is an analog part.
pub fn recognize(
    impression: &crate::projection::SensoryImpression,
    reg: &FormatRegistry,
    format_id: &str,
) -> Result<SymbolStructure, InterpretError> {
    let format = reg.get_format(format_id)?;
    if format.fonts.is_empty() || format.type_sets.is_empty() {
        return Err(InterpretError::NotDiscreteFormat(format_id.to_string()));
    }
    let rules = reg.rules_for_format(format);
    let arrangement = segment(impression, rules);
    let bitmap = impression.to_bitmap();
    let s = impression.scale;

    let member_types: BTreeSet<String> = format
        .type_sets
        .iter()
        .filter_map(|id| reg.type_sets.get(id))
        .flat_map(|set| set.members.keys().cloned())
        .collect();
    let alphabet = reg.alphabet(format);

    let mut templates = Vec::new();
    let mut max_w = 0u32;
    let mut max_h = 0u32;
    for t in reg.templates(format) {
        if !member_types.contains(&t.type_id) && !alphabet.contains(&t.type_id) {
            continue;
        }
        let scaled = downscale_by(&t.bitmap, s);
        max_w = max_w.max(scaled.width);
        max_h = max_h.max(scaled.height);
        if let Some(pattern) = scaled.cropped() {
            templates.push(PatternTemplate {
                font_id: t.font_id,
                type_id: t.type_id,
                style: t.style,
                pattern,
            });
        }
    }

    let all_boxes: Vec<Rect> = arrangement
        .lines
        .iter()
        .flat_map(|l| l.boxes.iter().map(|(r, _)| *r))
        .collect();

    let results: Vec<BoxResult> = map_boxes(&all_boxes, |rect| {
        let pattern = bitmap.crop(rect);
        let matches: Vec<&PatternTemplate> =
            templates.iter().filter(|t| t.pattern == pattern).collect();
        if matches.is_empty() {
            if rect.w > 2 * max_w || rect.h > 2 * max_h {
                return BoxResult::Analog(AnalogPart {
                    region: *rect,
                    payload_digest: Some(sha256_hex(pattern.render_rows().join("\n").as_bytes())),
                });
            }
            return BoxResult::Occ(SymbolOccurrence::undefined());
        }
        let types: BTreeSet<String> = matches
            .iter()
            .map(|t| normalize_type(format, &t.type_id))
            .collect();
        let styles: Vec<StyleAttrs> = matches
            .iter()
            .map(|t| {
                let mut attrs = StyleAttrs::plain();
                attrs.font_family = Some(t.font_id.clone());
                t.style.apply_to(&mut attrs);
                format.meaningful.filter_style(&attrs)
            })
            .collect();
        // If the matching templates disagree on meaningful style, prefer
        // the plainest reading, deterministically.
        let style = styles
            .into_iter()
            .min_by_key(|a| (a.canonical_tokens().len(), a.clone()))
            .unwrap();
        BoxResult::Occ(SymbolOccurrence::new(Symbols::Types(types)).with_style(style))
    });

    let mut result_iter = results.into_iter();
    let mut analog_parts = Vec::new();
    // Paragraph groups of lines, each line a list of word-token runs.
    let mut paragraphs: Vec<Vec<Vec<Vec<SymbolOccurrence>>>> = Vec::new();
    for line in &arrangement.lines {
        let mut words: Vec<Vec<SymbolOccurrence>> = Vec::new();
        let mut starts_paragraph = false;
        let mut pending_break = false;
        for (bi, (_, class)) in line.boxes.iter().enumerate() {
            let result = result_iter.next().expect("one result per box");
            if bi == 0 && *class == GapClass::ParagraphBreak {
                starts_paragraph = true;
            }
            let occ = match result {
                BoxResult::Analog(part) => {
                    analog_parts.push(part);
                    // A removed box must not swallow a word gap.
                    if *class == GapClass::InterWord {
                        pending_break = true;
                    }
                    continue;
                }
                BoxResult::Occ(o) => o,
            };
            let word_break = bi == 0 || *class >= GapClass::InterWord || pending_break;
            pending_break = false;
            if word_break || words.is_empty() {
                words.push(Vec::new());
            }
            words.last_mut().unwrap().push(occ);
        }
        let words: Vec<Vec<SymbolOccurrence>> =
            words.into_iter().filter(|w| !w.is_empty()).collect();
        if words.is_empty() {
            continue;
        }
        if paragraphs.is_empty() || starts_paragraph {
            paragraphs.push(Vec::new());
        }
        paragraphs.last_mut().unwrap().push(words);
    }

    let root = assemble_text_structure(format, paragraphs);
    let mut structure = SymbolStructure::new(format_id, root);
    structure.analog_parts = analog_parts;
    Ok(structure)
}

/// Build the container tree for paragraph/line/word token groups under a
/// format's meaningful flags. Shared by recognition and digital
/// interpretation so both pipelines produce the same shape.
fn assemble_text_structure(
    format: &InformationFormat,
    paragraphs: Vec<Vec<Vec<Vec<SymbolOccurrence>>>>,
) -> Container {
    let mut root = Container::new("document");
    for para in paragraphs {
        let mut para_lines = Vec::new();
        for words in para {
            let mut line = Container::new("line");
            if format.meaningful.word_separators {
                for (wi, word) in words.into_iter().enumerate() {
                    if wi > 0 {
                        line.push(Node::Occurrence(SymbolOccurrence::of_type(SPACE_TYPE)));
                    }
                    let mut w = Container::new("word");
                    for occ in word {
                        w.push(Node::Occurrence(occ));
                    }
                    line.push(Node::Container(w));
                }
            } else {
                for word in words {
                    for occ in word {
                        line.push(Node::Occurrence(occ));
                    }
                }
            }
            para_lines.push(Node::Container(line));
        }
        if para_lines.is_empty() {
            continue;
        }
        if format.meaningful.paragraphs {
            root.push(Node::Container(Container::with_children(
                "paragraph",
                para_lines,
            )));
        } else {
            for l in para_lines {
                root.push(l);
            }
        }
    }
    root
}

/// All analog content parts found on an impression.
pub fn extract_analog_parts(
    impression: &crate::projection::SensoryImpression,
    reg: &FormatRegistry,
    format_id: &str,
) -> Result<Vec<AnalogPart>, InterpretError> {
    Ok(recognize(impression, reg, format_id)?.analog_parts)
}

/// Interpret a digital object directly into a symbol structure.
pub fn digital_interpret(
    obj: &crate::projection::DigitalObject,
    reg: &FormatRegistry,
    format_id: &str,
) -> Result<SymbolStructure, InterpretError> {
    let format = reg.get_format(format_id)?;
    if let Some(charset) = Charset::from_type_tag(&obj.type_tag) {
        return interpret_text(obj, charset, reg, format);
    }
    if obj.type_tag == "text/html" {
        return interpret_html(obj, reg, format);
    }
    Err(InterpretError::UnsupportedType(obj.type_tag.clone()))
}

fn char_to_type(
    format: &InformationFormat,
    alphabet: &BTreeSet<String>,
    c: char,
) -> Result<String, InterpretError> {
    let raw = type_id_for_char(c).ok_or(InterpretError::UnmappedSymbol(c))?;
    let id = normalize_type(format, &raw);
    if id != SPACE_TYPE && !alphabet.contains(&id) {
        return Err(InterpretError::UnmappedSymbol(c));
    }
    Ok(id)
}

fn interpret_text(
    obj: &crate::projection::DigitalObject,
    charset: Charset,
    reg: &FormatRegistry,
    format: &InformationFormat,
) -> Result<SymbolStructure, InterpretError> {
    let chars = charset
        .decode(&obj.bytes)
        .map_err(|offset| InterpretError::DecodeError { offset })?;
    let alphabet = reg.alphabet(format);

    // Paragraphs of lines of words; a blank line separates paragraphs.
    let mut paragraphs: Vec<Vec<Vec<Vec<SymbolOccurrence>>>> = vec![Vec::new()];
    let mut line: Vec<Vec<SymbolOccurrence>> = Vec::new();
    let mut word: Vec<SymbolOccurrence> = Vec::new();
    for &c in &chars {
        match c {
            '\n' => {
                if !word.is_empty() {
                    line.push(std::mem::take(&mut word));
                }
                if line.is_empty() {
                    // Blank line: close the paragraph.
                    if format.meaningful.paragraphs && !paragraphs.last().unwrap().is_empty() {
                        paragraphs.push(Vec::new());
                    }
                } else {
                    paragraphs
                        .last_mut()
                        .unwrap()
                        .push(std::mem::take(&mut line));
                }
            }
            ' ' => {
                if !word.is_empty() {
                    line.push(std::mem::take(&mut word));
                }
            }
            _ => {
                let id = char_to_type(format, &alphabet, c)?;
                word.push(SymbolOccurrence::of_type(id));
            }
        }
    }
    if !word.is_empty() {
        line.push(word);
    }
    if !line.is_empty() {
        paragraphs.last_mut().unwrap().push(line);
    }

    let root = assemble_text_structure(format, paragraphs);
    Ok(SymbolStructure::new(&format.id, root))
}

/// Inline whitespace state while building DOM content.
struct InlineState {
    pending_space: bool,
    emitted_any: bool,
}

impl InlineState {
    fn fresh() -> InlineState {
        InlineState {
            pending_space: false,
            emitted_any: false,
        }
    }

    fn emit_text(
        &mut self,
        text: &str,
        style: &StyleAttrs,
        format: &InformationFormat,
        alphabet: &BTreeSet<String>,
        out: &mut Vec<Node>,
    ) -> Result<(), InterpretError> {
        for c in text.chars() {
            if c.is_whitespace() {
                if self.emitted_any {
                    self.pending_space = true;
                }
                continue;
            }
            if self.pending_space {
                out.push(Node::Occurrence(SymbolOccurrence::of_type(SPACE_TYPE)));
                self.pending_space = false;
            }
            let id = char_to_type(format, alphabet, c)?;
            out.push(Node::Occurrence(
                SymbolOccurrence::of_type(id).with_style(style.clone()),
            ));
            self.emitted_any = true;
        }
        Ok(())
    }
}

struct DomBuilder<'a> {
    format: &'a InformationFormat,
    alphabet: BTreeSet<String>,
}

impl DomBuilder<'_> {
    fn style_for(&self, parent: &StyleAttrs, tag: &str) -> StyleAttrs {
        let mut style = parent.clone();
        match tag {
            "b" if self.format.meaningful.bold => style.bold = true,
            "i" if self.format.meaningful.italic => style.italic = true,
            "u" if self.format.meaningful.underline => style.underline = true,
            _ => {}
        }
        style
    }

    fn build_children(
        &self,
        nodes: &[html::HtmlNode],
        style: &StyleAttrs,
        out: &mut Vec<Node>,
    ) -> Result<(), InterpretError> {
        let mut state = InlineState::fresh();
        self.build_run(nodes, style, out, &mut state)
    }

    fn build_run(
        &self,
        nodes: &[html::HtmlNode],
        style: &StyleAttrs,
        out: &mut Vec<Node>,
        state: &mut InlineState,
    ) -> Result<(), InterpretError> {
        for node in nodes {
            match node {
                html::HtmlNode::Text(t) => {
                    state.emit_text(t, style, self.format, &self.alphabet, out)?
                }
                html::HtmlNode::Element(e) => match e.name.as_str() {
                    "b" | "i" | "u" => {
                        let inner = self.style_for(style, &e.name);
                        self.build_run(&e.children, &inner, out, state)?;
                    }
                    "a" => {
                        if state.pending_space {
                            out.push(Node::Occurrence(SymbolOccurrence::of_type(SPACE_TYPE)));
                            state.pending_space = false;
                        }
                        let mut a = Container::new("a");
                        a.attrs = e.attrs.clone();
                        self.build_run(&e.children, style, &mut a.children, state)?;
                        out.push(Node::Container(a));
                    }
                    "br" => {
                        *state = InlineState::fresh();
                        out.push(Node::Container(Container::new("br")));
                    }
                    "pre" => {
                        out.push(Node::Container(self.build_pre(e, style)?));
                        *state = InlineState::fresh();
                    }
                    name => {
                        let mut c = Container::new(name);
                        self.build_children(&e.children, style, &mut c.children)?;
                        out.push(Node::Container(c));
                        *state = InlineState::fresh();
                    }
                },
            }
        }
        Ok(())
    }

    /// `pre` keeps whitespace verbatim: one line container per text line,
    /// every space an occurrence.
    fn build_pre(
        &self,
        e: &html::HtmlElement,
        style: &StyleAttrs,
    ) -> Result<Container, InterpretError> {
        let mut text = String::new();
        for child in &e.children {
            match child {
                html::HtmlNode::Text(t) => text.push_str(t),
                html::HtmlNode::Element(inner) => {
                    return Err(InterpretError::HtmlParseError {
                        line: inner.line,
                        msg: "only text is allowed inside pre".to_string(),
                    })
                }
            }
        }
        let mut pre = Container::new("pre");
        for raw_line in text.split('\n') {
            if raw_line.is_empty() {
                continue;
            }
            let mut line = Container::new("line");
            for c in raw_line.chars() {
                let id = char_to_type(self.format, &self.alphabet, c)?;
                line.push(Node::Occurrence(
                    SymbolOccurrence::of_type(id).with_style(style.clone()),
                ));
            }
            if !line.children.is_empty() {
                pre.push(Node::Container(line));
            }
        }
        Ok(pre)
    }
}

fn interpret_html(
    obj: &crate::projection::DigitalObject,
    reg: &FormatRegistry,
    format: &InformationFormat,
) -> Result<SymbolStructure, InterpretError> {
    let text = std::str::from_utf8(&obj.bytes).map_err(|e| InterpretError::DecodeError {
        offset: e.valid_up_to(),
    })?;
    let nodes = html::parse_html(text)?;
    let builder = DomBuilder {
        format,
        alphabet: reg.alphabet(format),
    };
    let mut root = Container::new("document");
    builder.build_children(&nodes, &StyleAttrs::plain(), &mut root.children)?;
    prune_empty_blocks(&mut root);

    match format.structure_model {
        StructureModel::Dom => Ok(SymbolStructure::new(&format.id, root)),
        StructureModel::Text => {
            let paragraphs = flatten_dom(&root);
            let root = assemble_text_structure(format, paragraphs);
            Ok(SymbolStructure::new(&format.id, root))
        }
    }
}

/// Drop containers that ended up with no content at all (e.g. a body that
/// held only whitespace). `a` and `br` survive even when empty.
fn prune_empty_blocks(c: &mut Container) {
    c.children.retain_mut(|child| match child {
        Node::Occurrence(_) => true,
        Node::Container(inner) => {
            prune_empty_blocks(inner);
            !inner.children.is_empty()
                || inner.kind == "br"
                || inner.kind == "a"
                || !inner.attrs.is_empty()
        }
    });
}

type ParaGroups = Vec<Vec<Vec<Vec<SymbolOccurrence>>>>;

/// Flatten a DOM-shaped tree to paragraph/line/word groups: each block
/// element's inline content becomes one paragraph, br splits lines.
fn flatten_dom(root: &Container) -> ParaGroups {
    let mut paras: ParaGroups = Vec::new();
    walk_blocks(root, &mut paras);
    paras
}

fn walk_blocks(c: &Container, paras: &mut ParaGroups) {
    let mut inline_run: Vec<&Node> = Vec::new();
    for child in &c.children {
        let is_inline = matches!(child, Node::Occurrence(_))
            || matches!(child, Node::Container(inner) if matches!(inner.kind.as_str(), "a" | "word" | "br"));
        if is_inline {
            inline_run.push(child);
            continue;
        }
        flush_inline_paragraph(&inline_run, paras);
        inline_run.clear();
        if let Node::Container(inner) = child {
            if inner.kind == "pre" {
                // Verbatim lines become one paragraph of their own.
                let mut lines = Vec::new();
                for line in &inner.children {
                    if let Node::Container(lc) = line {
                        let toks = collect_occurrences(lc);
                        let words = split_words(&toks);
                        if !words.is_empty() {
                            lines.push(words);
                        }
                    }
                }
                if !lines.is_empty() {
                    paras.push(lines);
                }
            } else if has_block_children(inner) {
                walk_blocks(inner, paras);
            } else {
                // A leaf block: its inline content is one paragraph.
                let toks = collect_occurrences(inner);
                let lines = split_lines(inner, &toks);
                if !lines.is_empty() {
                    paras.push(lines);
                }
            }
        }
    }
    flush_inline_paragraph(&inline_run, paras);
}

fn has_block_children(c: &Container) -> bool {
    c.children.iter().any(|n| {
        matches!(n, Node::Container(inner)
            if !matches!(inner.kind.as_str(), "a" | "word" | "br" | "line"))
    })
}

fn flush_inline_paragraph(run: &[&Node], paras: &mut ParaGroups) {
    if run.is_empty() {
        return;
    }
    let mut holder = Container::new("line");
    for n in run {
        holder.push((*n).clone());
    }
    let toks = collect_occurrences(&holder);
    let lines = split_lines(&holder, &toks);
    if !lines.is_empty() {
        paras.push(lines);
    }
}

/// Occurrences of a subtree in reading order, with `br` containers kept
/// as line-break markers (None).
fn collect_occurrences(c: &Container) -> Vec<Option<SymbolOccurrence>> {
    let mut out = Vec::new();
    fn walk(c: &Container, out: &mut Vec<Option<SymbolOccurrence>>) {
        for child in &c.children {
            match child {
                Node::Occurrence(o) => out.push(Some(o.clone())),
                Node::Container(inner) if inner.kind == "br" => out.push(None),
                Node::Container(inner) => walk(inner, out),
            }
        }
    }
    walk(c, &mut out);
    out
}

fn split_lines(
    _c: &Container,
    toks: &[Option<SymbolOccurrence>],
) -> Vec<Vec<Vec<SymbolOccurrence>>> {
    let mut lines = Vec::new();
    for line_toks in toks.split(|t| t.is_none()) {
        let words = split_words(line_toks);
        if !words.is_empty() {
            lines.push(words);
        }
    }
    lines
}

fn split_words(toks: &[Option<SymbolOccurrence>]) -> Vec<Vec<SymbolOccurrence>> {
    let mut words = vec![Vec::new()];
    for t in toks.iter().flatten() {
        if t.symbols.resolved() == Some(SPACE_TYPE) {
            if !words.last().unwrap().is_empty() {
                words.push(Vec::new());
            }
        } else {
            words.last_mut().unwrap().push(t.clone());
        }
    }
    words.retain(|w| !w.is_empty());
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::builtin_registry;
    use crate::projection::{
        corrupt, physical_project, write_carrier, DigitalObject, PhysicalProjectionMethod,
    };
    use crate::raster::Scale;
    use crate::structure::Status;

    fn text_obj(s: &str) -> DigitalObject {
        DigitalObject::new(s.as_bytes().to_vec(), "text/plain;charset=ascii")
    }

    fn project_text(
        reg: &FormatRegistry,
        format: &str,
        font: &str,
        text: &str,
        scale: Scale,
    ) -> crate::projection::SensoryImpression {
        let s = digital_interpret(&text_obj(text), reg, format).unwrap();
        let carrier = write_carrier(&s, reg, format, font, 400).unwrap();
        physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(scale))
    }

    #[test]
    fn segment_finds_one_line_of_three_boxes() {
        let reg = builtin_registry();
        let img = project_text(&reg, "PLAIN_LATIN", "demo_mono", "ABC", Scale::ONE);
        let rules = reg.get_rules("ltr_default").unwrap();
        let arr = segment(&img, rules);
        assert_eq!(arr.lines.len(), 1);
        assert_eq!(arr.lines[0].boxes.len(), 3);
        assert!(arr.lines[0].boxes[1..]
            .iter()
            .all(|(_, c)| *c == GapClass::IntraWord));
    }

    #[test]
    fn segment_blank_impression_is_empty() {
        let reg = builtin_registry();
        let img = crate::projection::SensoryImpression::blank(50, 50, Scale::ONE);
        let rules = reg.get_rules("ltr_default").unwrap();
        assert_eq!(segment(&img, rules), SymbolArrangement::default());
    }

    #[test]
    fn segment_classifies_word_and_paragraph_gaps() {
        let reg = builtin_registry();
        let img = project_text(&reg, "PLAIN_LATIN", "demo_mono", "ab cd\n\nef", Scale::ONE);
        let rules = reg.get_rules("ltr_default").unwrap();
        let arr = segment(&img, rules);
        assert_eq!(arr.lines.len(), 2);
        let classes: Vec<GapClass> = arr.lines[0].boxes.iter().map(|(_, c)| *c).collect();
        assert_eq!(
            classes,
            vec![
                GapClass::LineBreak,
                GapClass::IntraWord,
                GapClass::InterWord,
                GapClass::IntraWord
            ]
        );
        assert_eq!(arr.lines[1].boxes[0].1, GapClass::ParagraphBreak);
    }

    #[test]
    fn recognize_round_trips_plain_text() {
        let reg = builtin_registry();
        let original =
            digital_interpret(&text_obj("Hello world.\n\nBye now!"), &reg, "PLAIN_LATIN").unwrap();
        let carrier = write_carrier(&original, &reg, "PLAIN_LATIN", "demo_mono", 400).unwrap();
        let img = physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE));
        let recognized = recognize(&img, &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(recognized.root, original.root);
        assert_eq!(recognized.status, Status::Complete);
    }

    #[test]
    fn fonts_are_invisible_under_plain_latin() {
        let reg = builtin_registry();
        let mut readings = Vec::new();
        for font in ["demo_mono", "demo_slab", "demo_roman"] {
            let s = digital_interpret(&text_obj("ABC"), &reg, "PLAIN_LATIN").unwrap();
            let carrier = write_carrier(&s, &reg, "PLAIN_LATIN", font, 100).unwrap();
            let img = physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE));
            readings.push(recognize(&img, &reg, "PLAIN_LATIN").unwrap().root);
        }
        assert_eq!(readings[0], readings[1]);
        assert_eq!(readings[1], readings[2]);
    }

    #[test]
    fn fonts_are_visible_under_font_aware_latin() {
        let reg = builtin_registry();
        let s = digital_interpret(&text_obj("AB"), &reg, "FONT_AWARE_LATIN").unwrap();
        let mut readings = Vec::new();
        for font in ["demo_mono", "demo_slab"] {
            let carrier = write_carrier(&s, &reg, "FONT_AWARE_LATIN", font, 100).unwrap();
            let img = physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE));
            readings.push(recognize(&img, &reg, "FONT_AWARE_LATIN").unwrap());
        }
        assert_ne!(readings[0].root, readings[1].root);
        let mut families = BTreeSet::new();
        for r in &readings {
            r.root.visit_occurrences(&mut |o| {
                families.insert(o.style.font_family.clone().unwrap());
            });
        }
        assert_eq!(families.len(), 2);
    }

    #[test]
    fn corrupted_glyph_recognizes_as_undefined() {
        let reg = builtin_registry();
        let s = digital_interpret(&text_obj("AXC"), &reg, "PLAIN_LATIN").unwrap();
        let carrier = write_carrier(&s, &reg, "PLAIN_LATIN", "demo_mono", 100).unwrap();
        let x_placement = carrier
            .placements
            .iter()
            .find(|p| p.source_type_id == "LATIN_X_UPPER")
            .unwrap();
        let rect = Rect::new(x_placement.x, x_placement.y, 7, 10);
        let corrupted = corrupt(&carrier, rect).unwrap();
        let img = physical_project(
            &corrupted,
            &PhysicalProjectionMethod::plain_scan(Scale::ONE),
        );
        let recognized = recognize(&img, &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(recognized.status, Status::Undefined);
        assert!(recognized.has_undefined());
        // A projection method that sees through the corruption recovers
        // the original reading.
        let infrared = PhysicalProjectionMethod {
            id: "infrared".into(),
            scale: Scale::ONE,
            reveals_corrupted: true,
        };
        let img2 = physical_project(&corrupted, &infrared);
        let r2 = recognize(&img2, &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(r2.status, Status::Complete);
        let original = recognize(
            &physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE)),
            &reg,
            "PLAIN_LATIN",
        )
        .unwrap();
        assert_eq!(r2.root, original.root);
    }

    #[test]
    fn one_and_l_are_ambiguous_at_low_resolution() {
        let reg = builtin_registry();
        let img = project_text(&reg, "PLAIN_LATIN", "demo_mono", "1l", Scale::new(2, 5));
        let recognized = recognize(&img, &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(recognized.status, Status::Complete);
        let mut alt_sets = Vec::new();
        recognized.root.visit_occurrences(&mut |occ| {
            if let Symbols::Types(t) = &occ.symbols {
                alt_sets.push(t.clone());
            }
        });
        // At 4 px per em the two glyphs shrink to the same pattern, so
        // both boxes carry the same alternative set containing both types
        // (plus any other lookalikes at that resolution).
        assert_eq!(alt_sets.len(), 2);
        assert_eq!(alt_sets[0], alt_sets[1]);
        assert!(alt_sets[0].contains("DIGIT_1"));
        assert!(alt_sets[0].contains("LATIN_L_LOWER"));
        // At full resolution the same page reads unambiguously.
        let img = project_text(&reg, "PLAIN_LATIN", "demo_mono", "1l", Scale::ONE);
        let sharp = recognize(&img, &reg, "PLAIN_LATIN").unwrap();
        assert!(!sharp.has_ambiguity());
    }

    #[test]
    fn analog_block_is_reported_not_undefined() {
        let reg = builtin_registry();
        let s = digital_interpret(&text_obj("Hi"), &reg, "PLAIN_LATIN").unwrap();
        let mut carrier = write_carrier(&s, &reg, "PLAIN_LATIN", "demo_mono", 120).unwrap();
        let mut block = Bitmap::blank(40, 40);
        for y in 0..40 {
            for x in 0..40 {
                block.set(x, y, true);
            }
        }
        carrier.height = carrier.height.max(40);
        carrier.placements.push(crate::projection::PlacedGlyph {
            glyph: block,
            x: 60,
            y: 0,
            style: StyleAttrs::plain(),
            source_type_id: String::new(),
        });
        let img = physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE));
        let recognized = recognize(&img, &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(recognized.status, Status::Complete);
        assert_eq!(recognized.analog_parts.len(), 1);
        assert_eq!(recognized.analog_parts[0].region.w, 40);
        assert_eq!(recognized.occurrence_count(), 2); // H, i
        let parts = extract_analog_parts(&img, &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(parts, recognized.analog_parts);
    }

    #[test]
    fn ascii_and_utf8_encodings_interpret_identically() {
        let reg = builtin_registry();
        let a = digital_interpret(&text_obj("Same text"), &reg, "PLAIN_LATIN").unwrap();
        let b = digital_interpret(
            &DigitalObject::new("Same text".as_bytes().to_vec(), "text/plain;charset=utf8"),
            &reg,
            "PLAIN_LATIN",
        )
        .unwrap();
        assert_eq!(a.root, b.root);
    }

    #[test]
    fn empty_text_object_is_empty_complete() {
        let reg = builtin_registry();
        let s = digital_interpret(&text_obj(""), &reg, "PLAIN_LATIN").unwrap();
        assert_eq!(s.occurrence_count(), 0);
        assert_eq!(s.status, Status::Complete);
    }

    #[test]
    fn epigraphic_merges_and_folds_case() {
        let reg = builtin_registry();
        let a = digital_interpret(&text_obj("VERVM"), &reg, "LATIN_EPIGRAPHIC").unwrap();
        let b = digital_interpret(&text_obj("verum"), &reg, "LATIN_EPIGRAPHIC").unwrap();
        assert_eq!(a.root, b.root);
        let mut ids = Vec::new();
        a.root.visit_occurrences(&mut |o| {
            if let Some(id) = o.symbols.resolved() {
                ids.push(id.to_string());
            }
        });
        assert!(ids.contains(&"LATIN_UV_UPPER".to_string()));
    }

    #[test]
    fn unsupported_type_tag_rejected() {
        let reg = builtin_registry();
        let obj = DigitalObject::new(vec![0u8; 4], "application/octet-stream");
        assert_eq!(
            digital_interpret(&obj, &reg, "PLAIN_LATIN"),
            Err(InterpretError::UnsupportedType(
                "application/octet-stream".into()
            ))
        );
    }

    #[test]
    fn decode_error_carries_offset() {
        let reg = builtin_registry();
        let obj = DigitalObject::new(b"ok\xff".to_vec(), "text/plain;charset=ascii");
        assert_eq!(
            digital_interpret(&obj, &reg, "PLAIN_LATIN"),
            Err(InterpretError::DecodeError { offset: 2 })
        );
    }

    #[test]
    fn html_dom_structure_shape() {
        let reg = builtin_registry();
        let html = "<html>\n<head><title>My Title</title></head>\n<body>\n<a href=\"http://\">My Link </a>\n<h1> My header </h1>\n</body>\n</html>";
        let obj = DigitalObject::new(html.as_bytes().to_vec(), "text/html");
        let s = digital_interpret(&obj, &reg, "HTML_DOC").unwrap();
        let html_el = match &s.root.children[0] {
            Node::Container(c) => c,
            _ => panic!(),
        };
        assert_eq!(html_el.kind, "html");
        let kinds: Vec<&str> = html_el
            .children
            .iter()
            .map(|n| match n {
                Node::Container(c) => c.kind.as_str(),
                _ => "occ",
            })
            .collect();
        assert_eq!(kinds, vec!["head", "body"]);
    }

    #[test]
    fn html_flattens_to_text_under_plain_latin() {
        let reg = builtin_registry();
        let obj = DigitalObject::new(
            "<p>two words</p><p>more</p>".as_bytes().to_vec(),
            "text/plain;charset=ascii",
        );
        // Same text through the plain path for comparison.
        let plain = digital_interpret(
            &DigitalObject::new(
                "two words\n\nmore".as_bytes().to_vec(),
                "text/plain;charset=ascii",
            ),
            &reg,
            "PLAIN_LATIN",
        )
        .unwrap();
        let via_html = digital_interpret(
            &DigitalObject::new(
                "<p>two words</p><p>more</p>".as_bytes().to_vec(),
                "text/html",
            ),
            &reg,
            "PLAIN_LATIN",
        )
        .unwrap();
        assert_eq!(plain.root, via_html.root);
        drop(obj);
    }
}
