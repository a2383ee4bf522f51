//! Writing structures onto simulated carriers and projecting carriers and
//! digital objects into raster sensory impressions.

use thiserror::Error;

use crate::format::{FormatError, FormatRegistry, RenderStyle, SymbolFont};
use crate::interpret::{digital_interpret, InterpretError};
use crate::raster::{downscale_by, Bitmap, Rect, Scale};
use crate::structure::{Container, Node, StyleAttrs, SymbolStructure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("no glyph for type {type_id} in font {font}")]
    MissingGlyph { font: String, type_id: String },
    #[error("cannot write an undefined structure")]
    StructureUndefined,
    #[error("cannot write a structure with unresolved ambiguity")]
    StructureAmbiguous,
    #[error("bold and italic cannot be combined in the demo fonts")]
    UnsupportedStyle,
    #[error("unsupported type tag: {0}")]
    UnsupportedType(String),
    #[error("corruption rectangle does not intersect the carrier extent")]
    EmptyIntersection,
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Interpret(Box<InterpretError>),
    #[error("malformed carrier file at line {line}: {msg}")]
    MalformedCarrier { line: usize, msg: String },
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
}

impl From<InterpretError> for ProjectionError {
    fn from(e: InterpretError) -> ProjectionError {
        ProjectionError::Interpret(Box::new(e))
    }
}

/// A glyph instance placed on a carrier. `source_type_id` is bookkeeping
/// for test oracles only; recognition never reads it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedGlyph {
    pub glyph: Bitmap,
    pub x: u32,
    pub y: u32,
    pub style: StyleAttrs,
    pub source_type_id: String,
}

/// A simulated physical page: placed ink plus corrupted regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationCarrier {
    pub width: u32,
    pub height: u32,
    pub placements: Vec<PlacedGlyph>,
    pub deterioration: Vec<Rect>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalProjectionMethod {
    pub id: String,
    pub scale: Scale,
    /// Infrared-style recovery: corrupted rectangles are skipped instead
    /// of rendered as gray.
    pub reveals_corrupted: bool,
}

impl PhysicalProjectionMethod {
    pub fn plain_scan(scale: Scale) -> PhysicalProjectionMethod {
        PhysicalProjectionMethod {
            id: format!("scan-{scale}"),
            scale,
            reveals_corrupted: false,
        }
    }
}

/// A 2D intensity raster with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SensoryImpression {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<f64>,
    /// Output pixels per carrier pixel of the projection that made this.
    pub scale: Scale,
}

impl SensoryImpression {
    pub fn blank(width: u32, height: u32, scale: Scale) -> SensoryImpression {
        SensoryImpression {
            width,
            height,
            pixels: vec![0.0; (width as usize) * (height as usize)],
            scale,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.pixels[(y as usize) * (self.width as usize) + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: f64) {
        self.pixels[(y as usize) * (self.width as usize) + x as usize] = v;
    }

    /// Binarize at the 0.5 threshold. Mid-gray corruption counts as ink,
    /// which is what forces the recognizer into its no-match path.
    pub fn to_bitmap(&self) -> Bitmap {
        let mut b = Bitmap::blank(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) >= 0.5 {
                    b.set(x, y, true);
                }
            }
        }
        b
    }

    /// Plain PGM (P2), maxval 255, intensity = round(255 * value).
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for y in 0..self.height {
            let row: Vec<String> = (0..self.width)
                .map(|x| format!("{}", (self.get(x, y) * 255.0).round() as u32))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_pgm(text: &str) -> Result<SensoryImpression, ProjectionError> {
        let bad = |msg: &str| ProjectionError::MalformedPgm(msg.to_string());
        let mut tokens = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(|l| l.split_whitespace());
        if tokens.next() != Some("P2") {
            return Err(bad("missing P2 magic"));
        }
        let mut next_num = |what: &str| -> Result<u32, ProjectionError> {
            tokens
                .next()
                .and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(|| bad(&format!("missing or invalid {what}")))
        };
        let width = next_num("width")?;
        let height = next_num("height")?;
        let maxval = next_num("maxval")?;
        if maxval == 0 {
            return Err(bad("maxval must be positive"));
        }
        let mut img = SensoryImpression::blank(width, height, Scale::ONE);
        for i in 0..(width as usize * height as usize) {
            let v = next_num("pixel")?;
            if v > maxval {
                return Err(bad("pixel exceeds maxval"));
            }
            img.pixels[i] = v as f64 / maxval as f64;
        }
        Ok(img)
    }
}

/// A digital object: opaque bytes plus a type tag. Identity is exact byte
/// equality and tag equality; there is no notion of "similar" bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitalObject {
    pub bytes: Vec<u8>,
    pub type_tag: String,
}

impl DigitalObject {
    pub fn new(bytes: impl Into<Vec<u8>>, type_tag: impl Into<String>) -> DigitalObject {
        DigitalObject {
            bytes: bytes.into(),
            type_tag: type_tag.into(),
        }
    }
}

enum LineItem {
    Glyph { type_id: String, style: StyleAttrs },
    WordGap,
}

type LaidLine = Vec<LineItem>;
type LaidPara = Vec<LaidLine>;

struct Flattener {
    paras: Vec<LaidPara>,
    cur_para: LaidPara,
    cur_line: LaidLine,
}

impl Flattener {
    fn flush_line(&mut self) {
        if !self.cur_line.is_empty() {
            self.cur_para.push(std::mem::take(&mut self.cur_line));
        }
    }

    fn flush_para(&mut self) {
        self.flush_line();
        if !self.cur_para.is_empty() {
            self.paras.push(std::mem::take(&mut self.cur_para));
        }
    }

    fn walk(&mut self, container: &Container) -> Result<(), ProjectionError> {
        for child in &container.children {
            match child {
                Node::Occurrence(o) => {
                    let type_id = match &o.symbols {
                        crate::structure::Symbols::Undefined => {
                            return Err(ProjectionError::StructureUndefined)
                        }
                        s => s.resolved().ok_or(ProjectionError::StructureAmbiguous)?,
                    };
                    if type_id == crate::format::encoding::SPACE_TYPE {
                        self.cur_line.push(LineItem::WordGap);
                    } else {
                        self.cur_line.push(LineItem::Glyph {
                            type_id: type_id.to_string(),
                            style: o.style.clone(),
                        });
                    }
                }
                Node::Container(c) => match c.kind.as_str() {
                    "paragraph" => {
                        self.flush_para();
                        self.walk(c)?;
                        self.flush_para();
                    }
                    "line" | "title" | "p" | "h1" | "h2" | "h3" | "h4" | "h5" | "h6" => {
                        self.flush_line();
                        self.walk(c)?;
                        self.flush_line();
                    }
                    "br" => self.flush_line(),
                    // word containers and inline elements flow into the
                    // current line; other containers are transparent.
                    _ => self.walk(c)?,
                },
            }
        }
        Ok(())
    }
}

/// Break a structure into paragraphs of lines of glyphs and word gaps.
/// Works for both text-shaped and DOM-shaped structures: block elements
/// become lines, paragraph containers become paragraph groups.
fn flatten_layout(root: &Container) -> Result<Vec<LaidPara>, ProjectionError> {
    let mut f = Flattener {
        paras: Vec::new(),
        cur_para: Vec::new(),
        cur_line: Vec::new(),
    };
    f.walk(root)?;
    f.flush_para();
    Ok(f.paras)
}

fn render_style_for(style: &StyleAttrs) -> Result<RenderStyle, ProjectionError> {
    if style.bold && style.italic {
        return Err(ProjectionError::UnsupportedStyle);
    }
    Ok(RenderStyle {
        bold: style.bold,
        italic: style.italic,
        underline: style.underline,
    })
}

fn font_max_height(font: &SymbolFont) -> u32 {
    font.glyphs.values().map(|g| g.height).max().unwrap_or(0)
}

/// Lay the structure out on a fresh carrier under the format's arrangement
/// rules. Occurrences carrying a fontFamily attribute are rendered in that
/// font; everything else uses `default_font`.
pub fn write_carrier(
    structure: &SymbolStructure,
    reg: &FormatRegistry,
    format_id: &str,
    default_font: &str,
    page_width_px: u32,
) -> Result<InformationCarrier, ProjectionError> {
    let format = reg.get_format(format_id)?;
    let rules = reg.rules_for_format(format);
    let base_font = reg.get_font(default_font)?;
    let nominal_h = font_max_height(base_font).max(1);

    let paras = flatten_layout(&structure.root)?;

    let mut placements = Vec::new();
    let mut max_x = 0u32;
    let mut y = 0u32;
    let mut line_index = 0usize;
    let mut any_line = false;

    for (pi, para) in paras.iter().enumerate() {
        if pi > 0 {
            let blanks = rules.paragraph_blank_lines.unwrap_or(0);
            y += blanks * (nominal_h + rules.inter_line_gap_min_px);
        }
        for line in para {
            let mut x = 0u32;
            let mut line_placements = Vec::new();
            for item in line {
                match item {
                    LineItem::WordGap => x += rules.inter_word_gap_min_px,
                    LineItem::Glyph { type_id, style } => {
                        let font = match &style.font_family {
                            Some(f) => reg.get_font(f)?,
                            None => base_font,
                        };
                        let glyph = font
                            .styled_glyph(type_id, &render_style_for(style)?)
                            .ok_or_else(|| ProjectionError::MissingGlyph {
                                font: font.id.clone(),
                                type_id: type_id.clone(),
                            })?;
                        let w = glyph.width;
                        line_placements.push(PlacedGlyph {
                            glyph,
                            x,
                            y,
                            style: style.clone(),
                            source_type_id: type_id.clone(),
                        });
                        x += w + rules.inter_glyph_gap_px;
                    }
                }
            }
            let line_width = line_placements
                .iter()
                .map(|p| p.x + p.glyph.width)
                .max()
                .unwrap_or(0);
            if rules.direction == crate::format::Direction::Boustrophedon && line_index % 2 == 1 {
                for p in &mut line_placements {
                    p.x = line_width - (p.x + p.glyph.width);
                }
            }
            max_x = max_x.max(line_width);
            placements.extend(line_placements);
            y += nominal_h + rules.inter_line_gap_min_px;
            line_index += 1;
            any_line = true;
        }
    }

    let height = if any_line {
        y - rules.inter_line_gap_min_px
    } else {
        1
    };
    Ok(InformationCarrier {
        width: page_width_px.max(max_x).max(1),
        height,
        placements,
        deterioration: Vec::new(),
    })
}

/// Project a carrier into an intensity raster at the method's resolution.
/// Each glyph is resampled individually so that template matching sees the
/// same patterns the format validator checked.
pub fn physical_project(
    carrier: &InformationCarrier,
    method: &PhysicalProjectionMethod,
) -> SensoryImpression {
    let s = method.scale;
    let width = s.ceil(carrier.width).max(1);
    let height = s.ceil(carrier.height).max(1);
    let mut img = SensoryImpression::blank(width, height, s);

    for p in &carrier.placements {
        let scaled = downscale_by(&p.glyph, s);
        let ox = s.floor(p.x);
        let oy = s.floor(p.y);
        for gy in 0..scaled.height {
            for gx in 0..scaled.width {
                if scaled.get(gx, gy) {
                    let (x, y) = (ox + gx, oy + gy);
                    if x < width && y < height {
                        img.set(x, y, 1.0);
                    }
                }
            }
        }
    }

    if !method.reveals_corrupted {
        for r in &carrier.deterioration {
            let x0 = s.floor(r.x);
            let y0 = s.floor(r.y);
            let x1 = s.ceil(r.x + r.w).min(width);
            let y1 = s.ceil(r.y + r.h).min(height);
            for y in y0..y1 {
                for x in x0..x1 {
                    img.set(x, y, 0.5);
                }
            }
        }
    }
    img
}

/// Project a digital object: interpret it, write the structure to a
/// scratch carrier, project that carrier. Pixel-exact equal to composing
/// the three operations by hand.
pub fn digital_project(
    obj: &DigitalObject,
    reg: &FormatRegistry,
    format_id: &str,
    font_id: &str,
    page_width_px: u32,
    scale: Scale,
) -> Result<SensoryImpression, ProjectionError> {
    let structure = digital_interpret(obj, reg, format_id)?;
    let carrier = write_carrier(&structure, reg, format_id, font_id, page_width_px)?;
    Ok(physical_project(
        &carrier,
        &PhysicalProjectionMethod::plain_scan(scale),
    ))
}

/// Corruption produces a new carrier; the original is never altered.
pub fn corrupt(
    carrier: &InformationCarrier,
    rect: Rect,
) -> Result<InformationCarrier, ProjectionError> {
    let extent = Rect::new(0, 0, carrier.width, carrier.height);
    if !rect.intersects(&extent) {
        return Err(ProjectionError::EmptyIntersection);
    }
    let mut out = carrier.clone();
    out.deterioration.push(rect);
    Ok(out)
}

impl InformationCarrier {
    /// Line-delimited placement records, bit-exact across platforms.
    pub fn export(&self) -> String {
        let mut out = format!("CARRIER 1 {} {}\n", self.width, self.height);
        for p in &self.placements {
            let style = p.style.canonical_tokens();
            let style = if style.is_empty() {
                "-".to_string()
            } else {
                style.join(",")
            };
            out.push_str(&format!(
                "PLACE {} {} {} {} {}\n",
                p.x,
                p.y,
                p.source_type_id,
                style,
                p.glyph.render_rows().join("/")
            ));
        }
        for r in &self.deterioration {
            out.push_str(&format!("CORRUPT {r}\n"));
        }
        out
    }

    pub fn import(text: &str) -> Result<InformationCarrier, ProjectionError> {
        let bad = |line: usize, msg: &str| ProjectionError::MalformedCarrier {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
        let dims: Vec<&str> = header.split(' ').collect();
        if dims.len() != 4 || dims[0] != "CARRIER" || dims[1] != "1" {
            return Err(bad(1, "expected `CARRIER 1 <w> <h>`"));
        }
        let width = dims[2].parse().map_err(|_| bad(1, "bad width"))?;
        let height = dims[3].parse().map_err(|_| bad(1, "bad height"))?;
        let mut carrier = InformationCarrier {
            width,
            height,
            placements: Vec::new(),
            deterioration: Vec::new(),
        };
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("PLACE ") {
                let fields: Vec<&str> = rest.splitn(5, ' ').collect();
                if fields.len() != 5 {
                    return Err(bad(lineno, "PLACE needs 5 fields"));
                }
                let x = fields[0].parse().map_err(|_| bad(lineno, "bad x"))?;
                let y = fields[1].parse().map_err(|_| bad(lineno, "bad y"))?;
                let style =
                    parse_style_tokens(fields[3]).ok_or_else(|| bad(lineno, "bad style tokens"))?;
                let rows: Vec<&str> = fields[4].split('/').collect();
                if rows.is_empty() || rows.iter().any(|r| r.chars().any(|c| c != '.' && c != '#')) {
                    return Err(bad(lineno, "bad glyph rows"));
                }
                carrier.placements.push(PlacedGlyph {
                    glyph: Bitmap::parse(&rows),
                    x,
                    y,
                    style,
                    source_type_id: fields[2].to_string(),
                });
            } else if let Some(rest) = line.strip_prefix("CORRUPT ") {
                carrier
                    .deterioration
                    .push(parse_rect(rest).ok_or_else(|| bad(lineno, "bad rectangle"))?);
            } else {
                return Err(bad(lineno, "unknown record"));
            }
        }
        Ok(carrier)
    }
}

/// Parse a rectangle in its display form `x,y+WxH`.
pub fn parse_rect(s: &str) -> Option<Rect> {
    let (pos, size) = s.split_once('+')?;
    let (x, y) = pos.split_once(',')?;
    let (w, h) = size.split_once('x')?;
    Some(Rect::new(
        x.parse().ok()?,
        y.parse().ok()?,
        w.parse().ok()?,
        h.parse().ok()?,
    ))
}

fn parse_style_tokens(s: &str) -> Option<StyleAttrs> {
    let mut style = StyleAttrs::plain();
    if s == "-" {
        return Some(style);
    }
    for token in s.split(',') {
        match token {
            "bold" => style.bold = true,
            "italic" => style.italic = true,
            "underline" => style.underline = true,
            _ => {
                if let Some(f) = token.strip_prefix("fontFamily=") {
                    style.font_family = Some(f.to_string());
                } else {
                    let n = token.strip_prefix("sizePt=")?;
                    style.size_pt = Some(n.parse().ok()?);
                }
            }
        }
    }
    Some(style)
}
