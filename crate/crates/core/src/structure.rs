//! The encoding-independent symbol structure: nested containers, symbol
//! occurrences (possibly ambiguous), overlaps and analog placeholders.
//!
//! This is the identity-bearing value. Two carriers carry the same
//! information object with respect to a format exactly when the structures
//! extracted under that format are equal.

use std::collections::BTreeSet;

use crate::raster::Rect;

/// Style attributes recorded on an occurrence. Only flags the governing
/// format marks meaningful may be present.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct StyleAttrs {
    pub font_family: Option<String>,
    pub bold: bool,
    pub italic: bool,
    pub underline: bool,
    pub size_pt: Option<u32>,
}

impl StyleAttrs {
    pub fn plain() -> StyleAttrs {
        StyleAttrs::default()
    }

    pub fn is_plain(&self) -> bool {
        *self == StyleAttrs::default()
    }

    /// Canonical rendering: flags sorted by name, key=value for the rest.
    pub fn canonical_tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.bold {
            out.push("bold".to_string());
        }
        if let Some(f) = &self.font_family {
            out.push(format!("fontFamily={f}"));
        }
        if self.italic {
            out.push("italic".to_string());
        }
        if let Some(s) = self.size_pt {
            out.push(format!("sizePt={s}"));
        }
        if self.underline {
            out.push("underline".to_string());
        }
        out
    }
}

/// What a recognized position stands for: one or more candidate symbol
/// types (two or more encodes systematic ambiguity), or nothing
/// recoverable at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbols {
    /// Nonempty set of candidate symbol type ids.
    Types(BTreeSet<String>),
    /// The position could not be recognized (e.g. after corruption).
    Undefined,
}

impl Symbols {
    pub fn single(id: impl Into<String>) -> Symbols {
        let mut s = BTreeSet::new();
        s.insert(id.into());
        Symbols::Types(s)
    }

    pub fn alternatives<I: IntoIterator<Item = String>>(ids: I) -> Symbols {
        let set: BTreeSet<String> = ids.into_iter().collect();
        assert!(!set.is_empty(), "alternatives set must be nonempty");
        Symbols::Types(set)
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, Symbols::Undefined)
    }

    pub fn is_ambiguous(&self) -> bool {
        matches!(self, Symbols::Types(s) if s.len() > 1)
    }

    /// The single type id, if unambiguous.
    pub fn resolved(&self) -> Option<&str> {
        match self {
            Symbols::Types(s) if s.len() == 1 => s.iter().next().map(|s| s.as_str()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolOccurrence {
    pub symbols: Symbols,
    pub style: StyleAttrs,
}

impl SymbolOccurrence {
    pub fn new(symbols: Symbols) -> SymbolOccurrence {
        SymbolOccurrence {
            symbols,
            style: StyleAttrs::plain(),
        }
    }

    pub fn of_type(id: impl Into<String>) -> SymbolOccurrence {
        SymbolOccurrence::new(Symbols::single(id))
    }

    pub fn undefined() -> SymbolOccurrence {
        SymbolOccurrence::new(Symbols::Undefined)
    }

    pub fn with_style(mut self, style: StyleAttrs) -> SymbolOccurrence {
        self.style = style;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Container(Container),
    Occurrence(SymbolOccurrence),
}

impl Node {
    pub fn occ(id: impl Into<String>) -> Node {
        Node::Occurrence(SymbolOccurrence::of_type(id))
    }
}

/// A nested symbol container; children order is the reading sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub kind: String,
    /// Only format-meaningful attributes (e.g. `href`), sorted by key.
    pub attrs: std::collections::BTreeMap<String, String>,
    pub children: Vec<Node>,
}

impl Container {
    pub fn new(kind: impl Into<String>) -> Container {
        Container {
            kind: kind.into(),
            attrs: std::collections::BTreeMap::new(),
            children: Vec::new(),
        }
    }

    pub fn with_children(kind: impl Into<String>, children: Vec<Node>) -> Container {
        Container {
            kind: kind.into(),
            attrs: std::collections::BTreeMap::new(),
            children,
        }
    }

    pub fn push(&mut self, node: Node) {
        self.children.push(node);
    }

    /// Call `f` on every occurrence in reading order.
    pub fn visit_occurrences<'a>(&'a self, f: &mut impl FnMut(&'a SymbolOccurrence)) {
        for c in &self.children {
            match c {
                Node::Occurrence(o) => f(o),
                Node::Container(inner) => inner.visit_occurrences(f),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    Fragment,
    Undefined,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Complete => "Complete",
            Status::Fragment => "Fragment",
            Status::Undefined => "Undefined",
        };
        f.write_str(s)
    }
}

/// Placeholder for image or decorative content that does not follow the
/// discrete arrangement rules. The region participates in identity, the
/// preserved payload digest does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogPart {
    pub region: Rect,
    pub payload_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStructure {
    /// Id of the information format this structure was extracted under.
    pub format_id: String,
    pub root: Container,
    /// Unordered pairs of container paths (slash-separated child indices).
    pub overlaps: BTreeSet<(String, String)>,
    pub analog_parts: Vec<AnalogPart>,
    pub status: Status,
    /// Disambiguation provenance notes; not part of the identity payload.
    pub provenance: Vec<String>,
}

impl SymbolStructure {
    /// Build with status derived from the occurrence contents: Undefined
    /// iff any reachable occurrence is undefined, else Complete.
    pub fn new(format_id: impl Into<String>, root: Container) -> SymbolStructure {
        let mut s = SymbolStructure {
            format_id: format_id.into(),
            root,
            overlaps: BTreeSet::new(),
            analog_parts: Vec::new(),
            status: Status::Complete,
            provenance: Vec::new(),
        };
        s.refresh_status();
        s
    }

    pub fn empty(format_id: impl Into<String>) -> SymbolStructure {
        SymbolStructure::new(format_id, Container::new("document"))
    }

    pub fn has_undefined(&self) -> bool {
        let mut found = false;
        self.root.visit_occurrences(&mut |o| {
            if o.symbols.is_undefined() {
                found = true;
            }
        });
        found
    }

    pub fn has_ambiguity(&self) -> bool {
        let mut found = false;
        self.root.visit_occurrences(&mut |o| {
            if o.symbols.is_ambiguous() {
                found = true;
            }
        });
        found
    }

    pub fn occurrence_count(&self) -> usize {
        let mut n = 0;
        self.root.visit_occurrences(&mut |_| n += 1);
        n
    }

    /// Recompute status from content. Fragment is preserved if set.
    pub fn refresh_status(&mut self) {
        if self.has_undefined() {
            self.status = Status::Undefined;
        } else if self.status == Status::Undefined {
            self.status = Status::Complete;
        }
    }
}
