//! Canonical serialization, content digests, identity verdicts,
//! incorporation checks and migration verification.
//!
//! The canonical form is a line-delimited UTF-8 text, LF-terminated,
//! bit-exact for equal structure values no matter how they were built:
//!
//! ```text
//! CANON 1 <formatId>
//! NODE <depth> <kind> [key=value ...]
//! OCC <depth> {typeId|typeId...} [style tokens]     ({?} when undefined)
//! OVERLAP <pathA> <pathB>
//! ANALOG <x,y+WxH> -
//! STATUS <Complete|Fragment|Undefined>
//! ```
//!
//! Analog parts contribute their region only; the preserved payload digest
//! is not an identification element and serializes as `-`. Disambiguation
//! provenance is likewise excluded. The content digest is SHA-256 over the
//! canonical bytes, rendered as lowercase hex.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::format::FormatRegistry;
use crate::interpret::{digital_interpret, recognize, InterpretError};
use crate::projection::{
    physical_project, DigitalObject, InformationCarrier, PhysicalProjectionMethod,
};
use crate::raster::Rect;
use crate::structure::{
    AnalogPart, Container, Node, Status, StyleAttrs, SymbolOccurrence, SymbolStructure, Symbols,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("cannot compare structures of different formats: {left} vs {right}")]
    FormatMismatch { left: String, right: String },
    #[error("malformed canonical form at line {line}: {msg}")]
    MalformedCanonical { line: usize, msg: String },
    #[error("extraction failed at chain step {index}: {source}")]
    ChainStep {
        index: usize,
        #[source]
        source: Box<ExtractionError>,
    },
    #[error(transparent)]
    Interpret(#[from] InterpretError),
}

/// Extraction failure inside a migration chain.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractionError {
    #[error(transparent)]
    Interpret(#[from] InterpretError),
}

/// Deterministic serialization of a structure plus its content hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub bytes: Vec<u8>,
    /// SHA-256 of `bytes` in lowercase hex.
    pub digest: String,
}

impl CanonicalForm {
    pub fn text(&self) -> &str {
        std::str::from_utf8(&self.bytes).expect("canonical bytes are UTF-8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Identical,
    Different,
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityVerdict {
    pub value: Verdict,
    /// For Different: (path, left value, right value) per divergence.
    pub diff: Vec<(String, String, String)>,
}

impl IdentityVerdict {
    fn of(value: Verdict) -> IdentityVerdict {
        IdentityVerdict {
            value,
            diff: Vec::new(),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Escape an attribute value so it survives whitespace-delimited lines.
fn escape(v: &str) -> String {
    let mut out = String::new();
    for c in v.chars() {
        match c {
            '%' => out.push_str("%25"),
            ' ' => out.push_str("%20"),
            '\n' => out.push_str("%0A"),
            '\t' => out.push_str("%09"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(v: &str, line: usize) -> Result<String, IdentityError> {
    let mut out = String::new();
    let mut chars = v.chars();
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        let hex: String = chars.by_ref().take(2).collect();
        let code = u8::from_str_radix(&hex, 16).map_err(|_| IdentityError::MalformedCanonical {
            line,
            msg: format!("bad escape %{hex}"),
        })?;
        out.push(code as char);
    }
    Ok(out)
}

fn render_symbols(s: &Symbols) -> String {
    match s {
        Symbols::Undefined => "{?}".to_string(),
        Symbols::Types(ids) => {
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            format!("{{{}}}", ids.join("|"))
        }
    }
}

fn write_node(node: &Node, depth: usize, out: &mut String) {
    match node {
        Node::Container(c) => {
            out.push_str(&format!("NODE {depth} {}", c.kind));
            for (k, v) in &c.attrs {
                out.push_str(&format!(" {}={}", escape(k), escape(v)));
            }
            out.push('\n');
            for child in &c.children {
                write_node(child, depth + 1, out);
            }
        }
        Node::Occurrence(o) => {
            out.push_str(&format!("OCC {depth} {}", render_symbols(&o.symbols)));
            for tok in o.style.canonical_tokens() {
                out.push(' ');
                out.push_str(&tok);
            }
            out.push('\n');
        }
    }
}

/// Serialize a structure deterministically and hash the bytes.
pub fn canonicalize(s: &SymbolStructure) -> CanonicalForm {
    let mut out = String::new();
    out.push_str(&format!("CANON 1 {}\n", s.format_id));
    write_node(&Node::Container(s.root.clone()), 0, &mut out);
    let overlaps: BTreeSet<_> = s.overlaps.iter().collect();
    for (a, b) in overlaps {
        out.push_str(&format!("OVERLAP {a} {b}\n"));
    }
    let mut regions: Vec<&Rect> = s.analog_parts.iter().map(|p| &p.region).collect();
    regions.sort_by_key(|r| (r.y, r.x, r.h, r.w));
    for r in regions {
        out.push_str(&format!("ANALOG {r} -\n"));
    }
    out.push_str(&format!("STATUS {}\n", s.status));
    let bytes = out.into_bytes();
    let digest = sha256_hex(&bytes);
    CanonicalForm { bytes, digest }
}

fn parse_occ_line(rest: &str, line: usize) -> Result<(usize, SymbolOccurrence), IdentityError> {
    let bad = |msg: &str| IdentityError::MalformedCanonical {
        line,
        msg: msg.to_string(),
    };
    let mut parts = rest.split(' ');
    let depth: usize = parts
        .next()
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| bad("missing depth"))?;
    let symbols = parts.next().ok_or_else(|| bad("missing symbols"))?;
    let inner = symbols
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| bad("symbols must be brace-delimited"))?;
    let symbols = if inner == "?" {
        Symbols::Undefined
    } else if inner.is_empty() {
        return Err(bad("empty symbol set"));
    } else {
        Symbols::alternatives(inner.split('|').map(String::from))
    };
    let mut style = StyleAttrs::plain();
    for tok in parts {
        match tok {
            "bold" => style.bold = true,
            "italic" => style.italic = true,
            "underline" => style.underline = true,
            _ => {
                if let Some(f) = tok.strip_prefix("fontFamily=") {
                    style.font_family = Some(unescape(f, line)?);
                } else if let Some(s) = tok.strip_prefix("sizePt=") {
                    style.size_pt = Some(s.parse().map_err(|_| bad("bad sizePt value"))?);
                } else {
                    return Err(bad(&format!("unknown style token {tok}")));
                }
            }
        }
    }
    Ok((depth, SymbolOccurrence::new(symbols).with_style(style)))
}

/// Parse a canonical form back into a structure. The analog payload
/// digest is not stored in the form, so it comes back as None.
pub fn parse_canonical(text: &str) -> Result<SymbolStructure, IdentityError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(IdentityError::MalformedCanonical {
        line: 1,
        msg: "empty input".into(),
    })?;
    let format_id = header
        .strip_prefix("CANON 1 ")
        .ok_or(IdentityError::MalformedCanonical {
            line: 1,
            msg: "missing CANON 1 header".into(),
        })?
        .to_string();

    // Stack of open containers by depth; index = depth.
    let mut stack: Vec<Container> = Vec::new();
    let mut root: Option<Container> = None;
    let mut overlaps = BTreeSet::new();
    let mut analog_parts = Vec::new();
    let mut status: Option<Status> = None;

    fn close_to(stack: &mut Vec<Container>, depth: usize, root: &mut Option<Container>) {
        while stack.len() > depth {
            let done = stack.pop().unwrap();
            match stack.last_mut() {
                Some(parent) => parent.push(Node::Container(done)),
                None => *root = Some(done),
            }
        }
    }

    for (i, raw) in lines {
        let line = i + 1;
        let bad = |msg: String| IdentityError::MalformedCanonical { line, msg };
        let (tag, rest) = raw.split_once(' ').unwrap_or((raw, ""));
        match tag {
            "NODE" => {
                let mut parts = rest.split(' ');
                let depth: usize = parts
                    .next()
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| bad("missing depth".into()))?;
                let kind = parts.next().ok_or_else(|| bad("missing kind".into()))?;
                if depth > stack.len() {
                    return Err(bad(format!("depth jump to {depth}")));
                }
                close_to(&mut stack, depth, &mut root);
                if depth == 0 && (root.is_some() || !stack.is_empty()) {
                    return Err(bad("multiple roots".into()));
                }
                let mut c = Container::new(kind);
                for attr in parts {
                    let (k, v) = attr
                        .split_once('=')
                        .ok_or_else(|| bad(format!("bad attribute {attr}")))?;
                    c.attrs.insert(unescape(k, line)?, unescape(v, line)?);
                }
                stack.push(c);
            }
            "OCC" => {
                let (depth, occ) = parse_occ_line(rest, line)?;
                if depth > stack.len() {
                    return Err(bad(format!("depth jump to {depth}")));
                }
                if depth == 0 {
                    return Err(bad("occurrence cannot be the root".into()));
                }
                close_to(&mut stack, depth, &mut root);
                stack.last_mut().unwrap().push(Node::Occurrence(occ));
            }
            "OVERLAP" => {
                let (a, b) = rest
                    .split_once(' ')
                    .ok_or_else(|| bad("overlap needs two paths".into()))?;
                overlaps.insert((a.to_string(), b.to_string()));
            }
            "ANALOG" => {
                let region_str = rest
                    .split(' ')
                    .next()
                    .ok_or_else(|| bad("missing region".into()))?;
                let region = crate::projection::parse_rect(region_str)
                    .ok_or_else(|| bad(format!("bad region {region_str}")))?;
                analog_parts.push(AnalogPart {
                    region,
                    payload_digest: None,
                });
            }
            "STATUS" => {
                status = Some(match rest {
                    "Complete" => Status::Complete,
                    "Fragment" => Status::Fragment,
                    "Undefined" => Status::Undefined,
                    other => return Err(bad(format!("unknown status {other}"))),
                });
            }
            other => return Err(bad(format!("unknown record {other}"))),
        }
    }
    close_to(&mut stack, 0, &mut root);
    let root = root.ok_or(IdentityError::MalformedCanonical {
        line: 1,
        msg: "no root node".into(),
    })?;
    let status = status.ok_or(IdentityError::MalformedCanonical {
        line: 1,
        msg: "missing STATUS line".into(),
    })?;
    let mut s = SymbolStructure::new(format_id, root);
    s.overlaps = overlaps;
    s.analog_parts = analog_parts;
    s.status = status;
    Ok(s)
}

fn render_style(style: &StyleAttrs) -> String {
    let toks = style.canonical_tokens();
    if toks.is_empty() {
        "plain".to_string()
    } else {
        toks.join(" ")
    }
}

fn diff_nodes(a: &Node, b: &Node, path: &str, out: &mut Vec<(String, String, String)>) {
    match (a, b) {
        (Node::Container(ca), Node::Container(cb)) => {
            if ca.kind != cb.kind {
                out.push((path.to_string(), ca.kind.clone(), cb.kind.clone()));
                return;
            }
            if ca.attrs != cb.attrs {
                let show = |c: &Container| {
                    c.attrs
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                out.push((format!("{path}/@attrs"), show(ca), show(cb)));
            }
            if ca.children.len() != cb.children.len() {
                out.push((
                    path.to_string(),
                    format!("{} children", ca.children.len()),
                    format!("{} children", cb.children.len()),
                ));
            }
            for (i, (x, y)) in ca.children.iter().zip(&cb.children).enumerate() {
                diff_nodes(x, y, &format!("{path}/{i}"), out);
            }
        }
        (Node::Occurrence(oa), Node::Occurrence(ob)) => {
            if oa.symbols != ob.symbols {
                out.push((
                    path.to_string(),
                    render_symbols(&oa.symbols),
                    render_symbols(&ob.symbols),
                ));
            }
            if oa.style != ob.style {
                out.push((
                    format!("{path}/style"),
                    render_style(&oa.style),
                    render_style(&ob.style),
                ));
            }
        }
        (Node::Container(c), Node::Occurrence(o)) => {
            out.push((
                path.to_string(),
                format!("container {}", c.kind),
                render_symbols(&o.symbols),
            ));
        }
        (Node::Occurrence(o), Node::Container(c)) => {
            out.push((
                path.to_string(),
                render_symbols(&o.symbols),
                format!("container {}", c.kind),
            ));
        }
    }
}

fn diff_structures(a: &SymbolStructure, b: &SymbolStructure) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    diff_nodes(
        &Node::Container(a.root.clone()),
        &Node::Container(b.root.clone()),
        "document",
        &mut out,
    );
    if a.overlaps != b.overlaps {
        out.push((
            "overlaps".to_string(),
            format!("{} overlaps", a.overlaps.len()),
            format!("{} overlaps", b.overlaps.len()),
        ));
    }
    let regions = |s: &SymbolStructure| {
        let mut v: Vec<String> = s
            .analog_parts
            .iter()
            .map(|p| p.region.to_string())
            .collect();
        v.sort();
        v
    };
    let (ra, rb) = (regions(a), regions(b));
    if ra != rb {
        out.push(("analog".to_string(), ra.join(" "), rb.join(" ")));
    }
    if a.status != b.status {
        out.push((
            "status".to_string(),
            a.status.to_string(),
            b.status.to_string(),
        ));
    }
    out
}

/// Decide whether two structures carry the identical information object.
///
/// Both must have been extracted under the same format id; comparing
/// across formats compares different information objects and is an error,
/// not a Different verdict. If either structure is Undefined the verdict
/// is Undefined, even against itself.
pub fn identical(
    a: &SymbolStructure,
    b: &SymbolStructure,
) -> Result<IdentityVerdict, IdentityError> {
    if a.format_id != b.format_id {
        return Err(IdentityError::FormatMismatch {
            left: a.format_id.clone(),
            right: b.format_id.clone(),
        });
    }
    if a.status == Status::Undefined || b.status == Status::Undefined {
        return Ok(IdentityVerdict::of(Verdict::Undefined));
    }
    if canonicalize(a).bytes == canonicalize(b).bytes {
        return Ok(IdentityVerdict::of(Verdict::Identical));
    }
    Ok(IdentityVerdict {
        value: Verdict::Different,
        diff: diff_structures(a, b),
    })
}

/// Does the digital object incorporate the given structure under the
/// format? True iff interpreting the object yields an Identical verdict.
pub fn incorporates(
    obj: &DigitalObject,
    s: &SymbolStructure,
    reg: &FormatRegistry,
    format_id: &str,
) -> Result<bool, IdentityError> {
    let extracted = digital_interpret(obj, reg, format_id)?;
    Ok(identical(&extracted, s)?.value == Verdict::Identical)
}

/// One step of a migration chain: either raw bytes or a carrier together
/// with the projection method used to read it.
#[derive(Debug, Clone)]
pub struct ChainArtifact {
    pub id: String,
    pub payload: ChainPayload,
}

#[derive(Debug, Clone)]
pub enum ChainPayload {
    Digital(DigitalObject),
    Carrier {
        carrier: InformationCarrier,
        method: PhysicalProjectionMethod,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationReport {
    /// (artifact id, canonical digest of the extracted structure).
    pub chain: Vec<(String, String)>,
    pub verdict: IdentityVerdict,
    pub first_divergence: Option<usize>,
}

/// Verify that every artifact in a chain carries the identical
/// information object under the intended format.
pub fn verify_migration(
    chain: &[ChainArtifact],
    reg: &FormatRegistry,
    format_id: &str,
) -> Result<MigrationReport, IdentityError> {
    let mut digests = Vec::new();
    let mut structures = Vec::new();
    for (index, artifact) in chain.iter().enumerate() {
        let structure = match &artifact.payload {
            ChainPayload::Digital(obj) => digital_interpret(obj, reg, format_id),
            ChainPayload::Carrier { carrier, method } => {
                recognize(&physical_project(carrier, method), reg, format_id)
            }
        }
        .map_err(|e| IdentityError::ChainStep {
            index,
            source: Box::new(ExtractionError::Interpret(e)),
        })?;
        digests.push((artifact.id.clone(), canonicalize(&structure).digest));
        structures.push(structure);
    }

    for (index, s) in structures.iter().enumerate() {
        if s.status == Status::Undefined {
            return Ok(MigrationReport {
                chain: digests,
                verdict: IdentityVerdict::of(Verdict::Undefined),
                first_divergence: Some(index),
            });
        }
    }
    for index in 1..structures.len() {
        let verdict = identical(&structures[0], &structures[index])?;
        if verdict.value != Verdict::Identical {
            return Ok(MigrationReport {
                chain: digests,
                verdict,
                first_divergence: Some(index),
            });
        }
    }
    Ok(MigrationReport {
        chain: digests,
        verdict: IdentityVerdict::of(Verdict::Identical),
        first_divergence: None,
    })
}
