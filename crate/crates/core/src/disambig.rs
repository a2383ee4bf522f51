//! The interpretation cascade: narrowing systematic-ambiguity sets with a
//! word lexicon and a bigram grammar, and recovering undefined positions
//! from lexicon redundancy.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::format::encoding::char_for_type_id;
use crate::format::{FormatError, FormatRegistry};
use crate::structure::{Container, Node, SymbolStructure, Symbols};

/// Words that can be resolved into at most this many candidate spellings;
/// larger cross-products are left unresolved and flagged.
pub const MAX_EXPANSIONS: usize = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DisambigError {
    #[error("structure has no word containers; resolution needs word structure")]
    MissingWordStructure,
    #[error("grammar token {0:?} is not in the lexicon")]
    TokenNotInLexicon(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// A finite set of known word spellings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub id: String,
    pub words: BTreeSet<String>,
}

impl Lexicon {
    pub fn new(id: impl Into<String>, words: impl IntoIterator<Item = String>) -> Lexicon {
        Lexicon {
            id: id.into(),
            words: words.into_iter().collect(),
        }
    }

    /// Parse the one-token-per-line lexicon file format. Blank lines and
    /// `#` comments are skipped.
    pub fn parse(id: impl Into<String>, text: &str) -> Result<Lexicon, DisambigError> {
        let mut words = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let token = raw.trim();
            if token.is_empty() || token.starts_with('#') {
                continue;
            }
            if token.contains(char::is_whitespace) {
                return Err(DisambigError::Parse {
                    line: i + 1,
                    msg: format!("token {token:?} contains whitespace"),
                });
            }
            words.insert(token.to_string());
        }
        Ok(Lexicon {
            id: id.into(),
            words,
        })
    }

    fn contains(&self, token: &str, fold: bool) -> bool {
        if fold {
            let folded = token.to_lowercase();
            self.words.iter().any(|w| w.to_lowercase() == folded)
        } else {
            self.words.contains(token)
        }
    }
}

/// A minimal bigram part-of-speech model: which tag pairs may be adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GrammarRules {
    pub id: String,
    pub bigram_constraints: BTreeSet<(String, String)>,
    pub pos_lexicon: BTreeMap<String, BTreeSet<String>>,
}

impl GrammarRules {
    /// Parse the grammar file format: `pos <token> <tag>[,<tag>...]` and
    /// `allow <tagA> <tagB>` lines; blank lines and `#` comments skipped.
    pub fn parse(id: impl Into<String>, text: &str) -> Result<GrammarRules, DisambigError> {
        let mut rules = GrammarRules {
            id: id.into(),
            ..Default::default()
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| DisambigError::Parse { line: i + 1, msg };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("pos") => {
                    let token = parts
                        .next()
                        .ok_or_else(|| err("pos needs a token".into()))?;
                    let tags = parts.next().ok_or_else(|| err("pos needs tags".into()))?;
                    if parts.next().is_some() {
                        return Err(err("too many fields on pos line".into()));
                    }
                    rules
                        .pos_lexicon
                        .entry(token.to_string())
                        .or_default()
                        .extend(tags.split(',').map(String::from));
                }
                Some("allow") => {
                    let a = parts
                        .next()
                        .ok_or_else(|| err("allow needs two tags".into()))?;
                    let b = parts
                        .next()
                        .ok_or_else(|| err("allow needs two tags".into()))?;
                    if parts.next().is_some() {
                        return Err(err("too many fields on allow line".into()));
                    }
                    rules
                        .bigram_constraints
                        .insert((a.to_string(), b.to_string()));
                }
                Some(other) => return Err(err(format!("unknown directive {other}"))),
                None => unreachable!(),
            }
        }
        Ok(rules)
    }

    /// Every token with pos tags must be a lexicon word.
    pub fn validate(&self, lexicon: &Lexicon) -> Result<(), DisambigError> {
        for token in self.pos_lexicon.keys() {
            if !lexicon.words.contains(token) {
                return Err(DisambigError::TokenNotInLexicon(token.clone()));
            }
        }
        Ok(())
    }

    fn tags(&self, token: &str, fold: bool) -> Option<&BTreeSet<String>> {
        if let Some(t) = self.pos_lexicon.get(token) {
            return Some(t);
        }
        if fold {
            let folded = token.to_lowercase();
            return self
                .pos_lexicon
                .iter()
                .find(|(k, _)| k.to_lowercase() == folded)
                .map(|(_, v)| v);
        }
        None
    }

    fn pair_allowed(&self, left: &BTreeSet<String>, right: &BTreeSet<String>) -> bool {
        left.iter().any(|a| {
            right
                .iter()
                .any(|b| self.bigram_constraints.contains(&(a.clone(), b.clone())))
        })
    }
}

/// The character alternatives at each position of a word, or None when
/// the word cannot be expanded to character strings (undefined positions
/// or types with no character form).
fn word_char_sets(word: &Container) -> Option<Vec<BTreeSet<char>>> {
    let mut out = Vec::new();
    for child in &word.children {
        let occ = match child {
            Node::Occurrence(o) => o,
            Node::Container(_) => return None,
        };
        match &occ.symbols {
            Symbols::Undefined => return None,
            Symbols::Types(ids) => {
                let chars: BTreeSet<char> =
                    ids.iter().filter_map(|id| char_for_type_id(id)).collect();
                if chars.len() != ids.len() {
                    return None;
                }
                out.push(chars);
            }
        }
    }
    Some(out)
}

fn expansions(sets: &[BTreeSet<char>]) -> Option<Vec<String>> {
    let mut size = 1usize;
    for s in sets {
        size = size.checked_mul(s.len())?;
        if size > MAX_EXPANSIONS {
            return None;
        }
    }
    let mut out = vec![String::new()];
    for s in sets {
        let mut next = Vec::with_capacity(out.len() * s.len());
        for prefix in &out {
            for c in s {
                let mut w = prefix.clone();
                w.push(*c);
                next.push(w);
            }
        }
        out = next;
    }
    Some(out)
}

/// Write the surviving spellings back into a word's occurrences as
/// narrowed alternative sets.
fn write_back(word: &mut Container, survivors: &[String]) {
    for (i, child) in word.children.iter_mut().enumerate() {
        if let Node::Occurrence(occ) = child {
            let ids: BTreeSet<String> = survivors
                .iter()
                .filter_map(|w| w.chars().nth(i))
                .filter_map(crate::format::encoding::type_id_for_char)
                .collect();
            if !ids.is_empty() {
                occ.symbols = Symbols::Types(ids);
            }
        }
    }
}

fn render_sets(sets: &[BTreeSet<char>]) -> String {
    sets.iter()
        .map(|s| {
            if s.len() == 1 {
                s.iter().next().unwrap().to_string()
            } else {
                format!("{{{}}}", s.iter().collect::<String>())
            }
        })
        .collect()
}

/// Word containers per parent container, visited depth-first.
fn for_each_word_group(c: &mut Container, f: &mut impl FnMut(&mut Container, &[usize])) {
    let word_idx: Vec<usize> = c
        .children
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n {
            Node::Container(inner) if inner.kind == "word" => Some(i),
            _ => None,
        })
        .collect();
    if !word_idx.is_empty() {
        f(c, &word_idx);
    }
    for child in &mut c.children {
        if let Node::Container(inner) = child {
            if inner.kind != "word" {
                for_each_word_group(inner, f);
            }
        }
    }
}

fn has_word_containers(c: &Container) -> bool {
    c.children.iter().any(|n| match n {
        Node::Container(inner) => inner.kind == "word" || has_word_containers(inner),
        Node::Occurrence(_) => false,
    })
}

/// Narrow systematic-ambiguity sets with the lexicon (word level), then
/// with bigram constraints against resolved neighbor words (grammar
/// level). Never widens a set; records its steps in the structure's
/// provenance notes.
pub fn resolve(
    structure: &SymbolStructure,
    reg: &FormatRegistry,
    lexicon: &Lexicon,
    grammar: Option<&GrammarRules>,
) -> Result<SymbolStructure, DisambigError> {
    if let Some(g) = grammar {
        g.validate(lexicon)?;
    }
    let format = reg.get_format(&structure.format_id)?;
    let fold = !format.meaningful.case_sensitive;
    if structure.occurrence_count() > 0 && !has_word_containers(&structure.root) {
        return Err(DisambigError::MissingWordStructure);
    }

    let mut out = structure.clone();
    let mut notes = Vec::new();
    for_each_word_group(&mut out.root, &mut |parent, word_idx| {
        // Word level: lexicon filtering per ambiguous word.
        let mut survivors_by_word: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for &i in word_idx {
            let word = match &parent.children[i] {
                Node::Container(w) => w,
                _ => unreachable!(),
            };
            let Some(sets) = word_char_sets(word) else {
                continue;
            };
            if sets.iter().all(|s| s.len() == 1) {
                continue;
            }
            let original = render_sets(&sets);
            let Some(all) = expansions(&sets) else {
                notes.push(format!(
                    "word {original}: cross-product exceeds {MAX_EXPANSIONS}, left unresolved"
                ));
                continue;
            };
            let survivors: Vec<String> = all
                .into_iter()
                .filter(|w| lexicon.contains(w, fold))
                .collect();
            if survivors.is_empty() {
                notes.push(format!(
                    "word {original}: no lexicon match, alternatives retained (unresolvable)"
                ));
                continue;
            }
            survivors_by_word.insert(i, survivors);
        }

        // Grammar level: prune remaining multi-candidate words using the
        // pos tags of resolved neighbors.
        if let Some(g) = grammar {
            fn resolved_token(
                parent: &Container,
                i: usize,
                survivors: &BTreeMap<usize, Vec<String>>,
            ) -> Option<String> {
                let word = match &parent.children[i] {
                    Node::Container(w) => w,
                    _ => return None,
                };
                let sets = word_char_sets(word)?;
                match survivors.get(&i) {
                    Some(s) if s.len() == 1 => Some(s[0].clone()),
                    Some(_) => None,
                    None => sets
                        .iter()
                        .all(|s| s.len() == 1)
                        .then(|| sets.iter().map(|s| *s.iter().next().unwrap()).collect()),
                }
            }
            let multi: Vec<usize> = survivors_by_word
                .iter()
                .filter(|(_, s)| s.len() > 1)
                .map(|(&i, _)| i)
                .collect();
            for i in multi {
                let pos = word_idx.iter().position(|&j| j == i).unwrap();
                let left = pos
                    .checked_sub(1)
                    .and_then(|p| resolved_token(parent, word_idx[p], &survivors_by_word))
                    .and_then(|t| g.tags(&t, fold).cloned());
                let right = word_idx
                    .get(pos + 1)
                    .and_then(|&j| resolved_token(parent, j, &survivors_by_word))
                    .and_then(|t| g.tags(&t, fold).cloned());
                let kept: Vec<String> = survivors_by_word[&i]
                    .iter()
                    .filter(|cand| {
                        let Some(tags) = g.tags(cand, fold) else {
                            return true;
                        };
                        let left_ok = left.as_ref().is_none_or(|l| g.pair_allowed(l, tags));
                        let right_ok = right.as_ref().is_none_or(|r| g.pair_allowed(tags, r));
                        left_ok && right_ok
                    })
                    .cloned()
                    .collect();
                if !kept.is_empty() && kept.len() < survivors_by_word[&i].len() {
                    survivors_by_word.insert(i, kept);
                }
            }
        }

        for (&i, survivors) in &survivors_by_word {
            if let Node::Container(word) = &mut parent.children[i] {
                let before = render_sets(&word_char_sets(word).unwrap());
                write_back(word, survivors);
                if survivors.len() == 1 {
                    notes.push(format!("word {before}: resolved to {:?}", survivors[0]));
                } else {
                    notes.push(format!(
                        "word {before}: narrowed to {} candidates",
                        survivors.len()
                    ));
                }
            }
        }
    });
    out.provenance.extend(notes);
    out.refresh_status();
    Ok(out)
}

/// Recover UNDEFINED occurrences as single-position wildcards: if exactly
/// one lexicon word fits a damaged word, substitute it. If every
/// undefined position clears, the structure becomes Complete again.
pub fn resolve_undefined(
    structure: &SymbolStructure,
    reg: &FormatRegistry,
    lexicon: &Lexicon,
) -> Result<SymbolStructure, DisambigError> {
    let format = reg.get_format(&structure.format_id)?;
    let fold = !format.meaningful.case_sensitive;
    if structure.occurrence_count() > 0 && !has_word_containers(&structure.root) {
        return Err(DisambigError::MissingWordStructure);
    }

    let eq = |a: char, b: char| {
        if fold {
            a.to_lowercase().eq(b.to_lowercase())
        } else {
            a == b
        }
    };

    let mut out = structure.clone();
    let mut notes = Vec::new();
    for_each_word_group(&mut out.root, &mut |parent, word_idx| {
        for &i in word_idx {
            let Node::Container(word) = &mut parent.children[i] else {
                continue;
            };
            // Position pattern: None = wildcard, Some(set) = constrained.
            let mut pattern: Vec<Option<BTreeSet<char>>> = Vec::new();
            let mut any_undefined = false;
            let mut expandable = true;
            for child in &word.children {
                let Node::Occurrence(occ) = child else {
                    expandable = false;
                    break;
                };
                match &occ.symbols {
                    Symbols::Undefined => {
                        any_undefined = true;
                        pattern.push(None);
                    }
                    Symbols::Types(ids) => {
                        let chars: BTreeSet<char> =
                            ids.iter().filter_map(|id| char_for_type_id(id)).collect();
                        if chars.len() != ids.len() {
                            expandable = false;
                            break;
                        }
                        pattern.push(Some(chars));
                    }
                }
            }
            if !expandable || !any_undefined {
                continue;
            }
            let matches: Vec<&String> = lexicon
                .words
                .iter()
                .filter(|w| {
                    let chars: Vec<char> = w.chars().collect();
                    chars.len() == pattern.len()
                        && chars.iter().zip(&pattern).all(|(c, p)| match p {
                            None => true,
                            Some(set) => set.iter().any(|s| eq(*s, *c)),
                        })
                })
                .collect();
            let shown: String = pattern
                .iter()
                .map(|p| match p {
                    None => "?".to_string(),
                    Some(set) if set.len() == 1 => set.iter().next().unwrap().to_string(),
                    Some(set) => format!("{{{}}}", set.iter().collect::<String>()),
                })
                .collect();
            if matches.len() == 1 {
                let w = matches[0].clone();
                write_back(word, std::slice::from_ref(&w));
                notes.push(format!(
                    "word {shown}: recovered as {w:?} (unique completion)"
                ));
            } else {
                notes.push(format!(
                    "word {shown}: {} lexicon completions, left undefined",
                    matches.len()
                ));
            }
        }
    });
    out.provenance.extend(notes);
    out.refresh_status();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::builtin_registry;
    use crate::format::encoding::type_id_for_char;
    use crate::identity::canonicalize;
    use crate::structure::Status;
    use crate::structure::SymbolOccurrence;

    /// Build a word container from a spec like "ye{1l}low"; `?` makes an
    /// undefined occurrence.
    fn word(spec: &str) -> Node {
        let mut w = Container::new("word");
        let mut chars = spec.chars().peekable();
        while let Some(c) = chars.next() {
            let node = match c {
                '?' => Node::Occurrence(SymbolOccurrence::undefined()),
                '{' => {
                    let mut alts = BTreeSet::new();
                    for a in chars.by_ref() {
                        if a == '}' {
                            break;
                        }
                        alts.insert(type_id_for_char(a).unwrap());
                    }
                    Node::Occurrence(SymbolOccurrence::new(Symbols::Types(alts)))
                }
                _ => Node::occ(type_id_for_char(c).unwrap()),
            };
            w.push(node);
        }
        Node::Container(w)
    }

    fn sentence(format_id: &str, words: &[&str]) -> SymbolStructure {
        let mut line = Container::new("line");
        for (i, spec) in words.iter().enumerate() {
            if i > 0 {
                line.push(Node::occ("SPACE"));
            }
            line.push(word(spec));
        }
        let para = Container::with_children("paragraph", vec![Node::Container(line)]);
        SymbolStructure::new(
            format_id,
            Container::with_children("document", vec![Node::Container(para)]),
        )
    }

    fn demo_lexicon() -> Lexicon {
        Lexicon::parse("english_demo", "This\nis\na\nyellow\ncab\ncan\ncat\nhat\n").unwrap()
    }

    fn demo_grammar() -> GrammarRules {
        GrammarRules::parse(
            "english_demo",
            "pos a DET\npos yellow ADJ\npos can VERB\npos cab NOUN\nallow DET ADJ\nallow ADJ NOUN\n",
        )
        .unwrap()
    }

    fn word_strings(s: &SymbolStructure) -> Vec<String> {
        let mut out = Vec::new();
        fn walk(c: &Container, out: &mut Vec<String>) {
            if c.kind == "word" {
                let mut w = String::new();
                for child in &c.children {
                    if let Node::Occurrence(o) = child {
                        w.push_str(&match &o.symbols {
                            Symbols::Undefined => "?".to_string(),
                            Symbols::Types(ids) => {
                                let cs: String =
                                    ids.iter().filter_map(|i| char_for_type_id(i)).collect();
                                if cs.chars().count() == 1 {
                                    cs
                                } else {
                                    format!("{{{cs}}}")
                                }
                            }
                        });
                    }
                }
                out.push(w);
                return;
            }
            for child in &c.children {
                if let Node::Container(inner) = child {
                    walk(inner, out);
                }
            }
        }
        walk(&s.root, &mut out);
        out
    }

    #[test]
    fn yellow_cab_sentence_resolves_through_the_cascade() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["This", "is", "a", "ye{1l}low", "ca{hnb}"]);
        // Word level alone narrows cab/can but cannot pick one.
        let word_level = resolve(&s, &reg, &demo_lexicon(), None).unwrap();
        assert_eq!(
            word_strings(&word_level),
            vec!["This", "is", "a", "yellow", "ca{bn}"]
        );
        // Grammar level rejects the verb reading after an adjective.
        let full = resolve(&s, &reg, &demo_lexicon(), Some(&demo_grammar())).unwrap();
        assert_eq!(
            word_strings(&full),
            vec!["This", "is", "a", "yellow", "cab"]
        );
        assert!(!full.has_ambiguity());
        assert!(full.provenance.iter().any(|n| n.contains("yellow")));
    }

    #[test]
    fn unambiguous_structure_is_a_fixpoint() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["This", "is", "a", "cab"]);
        let r = resolve(&s, &reg, &demo_lexicon(), Some(&demo_grammar())).unwrap();
        assert_eq!(canonicalize(&r).bytes, canonicalize(&s).bytes);
    }

    #[test]
    fn resolve_is_idempotent() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["a", "ye{1l}low", "ca{hnb}"]);
        let once = resolve(&s, &reg, &demo_lexicon(), Some(&demo_grammar())).unwrap();
        let twice = resolve(&once, &reg, &demo_lexicon(), Some(&demo_grammar())).unwrap();
        assert_eq!(canonicalize(&once).bytes, canonicalize(&twice).bytes);
    }

    #[test]
    fn password_like_tokens_are_retained() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["x{1l}9q"]);
        let r = resolve(&s, &reg, &demo_lexicon(), None).unwrap();
        assert_eq!(word_strings(&r), vec!["x{1l}9q"]);
        assert!(r.provenance.iter().any(|n| n.contains("unresolvable")));
    }

    #[test]
    fn resolve_never_adds_alternatives() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["a", "ye{1l}low", "ca{hnb}"]);
        let r = resolve(&s, &reg, &demo_lexicon(), Some(&demo_grammar())).unwrap();
        let collect = |s: &SymbolStructure| {
            let mut v = Vec::new();
            s.root.visit_occurrences(&mut |o| {
                v.push(match &o.symbols {
                    Symbols::Types(ids) => ids.clone(),
                    Symbols::Undefined => BTreeSet::new(),
                });
            });
            v
        };
        for (before, after) in collect(&s).iter().zip(collect(&r).iter()) {
            assert!(after.is_subset(before));
        }
    }

    #[test]
    fn oversized_cross_product_is_flagged_not_enumerated() {
        let reg = builtin_registry();
        let big = "{abcdef}".repeat(4); // 1296 expansions
        let s = sentence("PLAIN_LATIN", &[big.as_str()]);
        let r = resolve(&s, &reg, &demo_lexicon(), None).unwrap();
        assert_eq!(word_strings(&r), word_strings(&s));
        assert!(r
            .provenance
            .iter()
            .any(|n| n.contains("cross-product exceeds")));
    }

    #[test]
    fn missing_word_structure_is_an_error() {
        let reg = builtin_registry();
        let s = SymbolStructure::new(
            "PLAIN_LATIN",
            Container::with_children("document", vec![Node::occ("LATIN_A_UPPER")]),
        );
        assert_eq!(
            resolve(&s, &reg, &demo_lexicon(), None),
            Err(DisambigError::MissingWordStructure)
        );
        assert_eq!(
            resolve_undefined(&s, &reg, &demo_lexicon()),
            Err(DisambigError::MissingWordStructure)
        );
    }

    #[test]
    fn unique_completion_recovers_undefined() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["yel?ow"]);
        assert_eq!(s.status, Status::Undefined);
        let r = resolve_undefined(&s, &reg, &demo_lexicon()).unwrap();
        assert_eq!(word_strings(&r), vec!["yellow"]);
        assert_eq!(r.status, Status::Complete);
    }

    #[test]
    fn non_unique_completion_stays_undefined() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["?at"]);
        let r = resolve_undefined(&s, &reg, &demo_lexicon()).unwrap();
        assert_eq!(word_strings(&r), vec!["?at"]);
        assert_eq!(r.status, Status::Undefined);
        assert!(r
            .provenance
            .iter()
            .any(|n| n.contains("2 lexicon completions")));
    }

    #[test]
    fn two_wildcards_with_unique_completion_resolve() {
        let reg = builtin_registry();
        let s = sentence("PLAIN_LATIN", &["y?l?ow"]);
        // Brute-force oracle: the only 6-letter lexicon word matching
        // y.l.ow is "yellow".
        let lexicon = demo_lexicon();
        let oracle: Vec<&String> = lexicon
            .words
            .iter()
            .filter(|w| {
                let c: Vec<char> = w.chars().collect();
                c.len() == 6 && c[0] == 'y' && c[2] == 'l' && c[4] == 'o' && c[5] == 'w'
            })
            .collect();
        assert_eq!(oracle, vec!["yellow"]);
        let r = resolve_undefined(&s, &reg, &demo_lexicon()).unwrap();
        assert_eq!(word_strings(&r), vec!["yellow"]);
        assert_eq!(r.status, Status::Complete);
    }

    #[test]
    fn grammar_file_parser_rejects_garbage() {
        assert!(GrammarRules::parse("g", "pos cab NOUN\nallow ADJ NOUN").is_ok());
        assert_eq!(
            GrammarRules::parse("g", "allow ADJ"),
            Err(DisambigError::Parse {
                line: 1,
                msg: "allow needs two tags".into()
            })
        );
        assert!(GrammarRules::parse("g", "frobnicate x y").is_err());
        let g = GrammarRules::parse("g", "pos ghost NOUN").unwrap();
        assert_eq!(
            g.validate(&demo_lexicon()),
            Err(DisambigError::TokenNotInLexicon("ghost".into()))
        );
    }

    #[test]
    fn lexicon_parser_skips_comments_and_blanks() {
        let l = Lexicon::parse("l", "# header\n\ncab\n  can  \n").unwrap();
        assert_eq!(l.words, ["cab".to_string(), "can".to_string()].into());
        assert!(Lexicon::parse("l", "two words").is_err());
    }
}
