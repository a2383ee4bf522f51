//! Shared helpers for integration tests: seeded random text generation,
//! the cross-pipeline fixture corpus, and the brute-force event-graph
//! oracle. Not every test binary uses every helper.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contident::ontology::{Entity, EntityKind, EventKind, EventRecord, OntologyStore, Role};

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
const DIGITS: &[u8] = b"0123456789";
const END_PUNCT: &[u8] = b".,:;!?";

/// A random word of letters and digits, optionally with trailing
/// punctuation. Always contains at least one letter or digit so a line of
/// words can never be mistaken for inter-line decoration.
pub fn gen_word(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(1..=6);
    let mut w = String::new();
    for _ in 0..len {
        let pool = if rng.gen_bool(0.85) { LETTERS } else { DIGITS };
        w.push(pool[rng.gen_range(0..pool.len())] as char);
    }
    if rng.gen_bool(0.2) {
        w.push(END_PUNCT[rng.gen_range(0..END_PUNCT.len())] as char);
    }
    w
}

/// Random plain text with words, lines and paragraph breaks, capped at
/// `max_chars` non-separator characters.
pub fn gen_text(rng: &mut impl Rng, max_chars: usize) -> String {
    let mut out = String::new();
    let mut used = 0usize;
    let paragraphs = rng.gen_range(1..=3);
    'outer: for p in 0..paragraphs {
        if p > 0 {
            out.push_str("\n\n");
        }
        let lines = rng.gen_range(1..=3);
        for l in 0..lines {
            if l > 0 {
                out.push('\n');
            }
            let words = rng.gen_range(1..=4);
            for w in 0..words {
                let word = gen_word(rng);
                if used + word.chars().count() > max_chars {
                    break 'outer;
                }
                if w > 0 {
                    out.push(' ');
                }
                used += word.chars().count();
                out.push_str(&word);
            }
        }
    }
    if out.chars().all(|c| c.is_whitespace()) {
        out = "x".to_string();
    }
    out
}

/// Random uppercase-only text for the epigraphic format (single line
/// groups, no paragraphs).
pub fn gen_epigraphic_text(rng: &mut impl Rng, max_chars: usize) -> String {
    let mut out = String::new();
    let mut used = 0usize;
    let lines = rng.gen_range(1..=3);
    'outer: for l in 0..lines {
        if l > 0 {
            out.push('\n');
        }
        let words = rng.gen_range(1..=3);
        for w in 0..words {
            let len = rng.gen_range(1..=6);
            let word: String = (0..len)
                .map(|_| (b'A' + rng.gen_range(0..26)) as char)
                .collect();
            if used + word.len() > max_chars {
                break 'outer;
            }
            if w > 0 {
                out.push(' ');
            }
            used += word.len();
            out.push_str(&word);
        }
    }
    if out.is_empty() {
        out = "X".to_string();
    }
    out
}

/// A digital object together with the format and font used to render it.
pub struct Fixture {
    pub name: &'static str,
    pub bytes: Vec<u8>,
    pub type_tag: &'static str,
    pub format: &'static str,
    pub font: &'static str,
}

fn fixture(
    name: &'static str,
    bytes: impl Into<Vec<u8>>,
    type_tag: &'static str,
    format: &'static str,
    font: &'static str,
) -> Fixture {
    Fixture {
        name,
        bytes: bytes.into(),
        type_tag,
        format,
        font,
    }
}

/// The cross-pipeline corpus: hand-picked text/plain and text/html inputs
/// across charsets and formats, plus seeded random text.
pub fn cross_pipeline_fixtures() -> Vec<Fixture> {
    let mut fx = vec![
        fixture(
            "single word",
            &b"Hello"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "two words",
            &b"two words"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "punctuated",
            &b"Stop. Go!"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_slab",
        ),
        fixture(
            "digits",
            &b"42 and 7"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_roman",
        ),
        fixture(
            "multi line",
            &b"line one\nline two"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "paragraphs",
            &b"para one\n\npara two"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "mixed case",
            &b"MiXeD CaSe"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_slab",
        ),
        fixture(
            "apostrophe",
            &b"can't stop"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_roman",
        ),
        fixture(
            "hyphenated",
            &b"well-known"[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "latin1 text",
            &b"plain latin1"[..],
            "text/plain;charset=latin1",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "utf8 text",
            "utf8 text".as_bytes().to_vec(),
            "text/plain;charset=utf8",
            "PLAIN_LATIN",
            "demo_slab",
        ),
        fixture(
            "question",
            &b"Why not? Fine."[..],
            "text/plain;charset=ascii",
            "PLAIN_LATIN",
            "demo_roman",
        ),
        fixture(
            "epigraphic caps",
            &b"SENATVS"[..],
            "text/plain;charset=ascii",
            "LATIN_EPIGRAPHIC",
            "epigraphic_mono",
        ),
        fixture(
            "epigraphic uv",
            &b"IVLIVS VERA"[..],
            "text/plain;charset=ascii",
            "LATIN_EPIGRAPHIC",
            "epigraphic_mono",
        ),
        fixture(
            "epigraphic lines",
            &b"ROMA\nAETERNA"[..],
            "text/plain;charset=ascii",
            "LATIN_EPIGRAPHIC",
            "epigraphic_mono",
        ),
        fixture(
            "html one para",
            &b"<p>two words</p>"[..],
            "text/html",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "html two paras",
            &b"<p>first block</p><p>second</p>"[..],
            "text/html",
            "PLAIN_LATIN",
            "demo_mono",
        ),
        fixture(
            "html br",
            &b"<p>one<br>two</p>"[..],
            "text/html",
            "PLAIN_LATIN",
            "demo_slab",
        ),
        fixture(
            "html heading",
            &b"<h1>Title</h1><p>body text</p>"[..],
            "text/html",
            "PLAIN_LATIN",
            "demo_roman",
        ),
        fixture(
            "html nested inline",
            &b"<p>a <b>bold</b> claim</p>"[..],
            "text/html",
            "PLAIN_LATIN",
            "demo_mono",
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..8 {
        let text = gen_text(&mut rng, 30);
        fx.push(Fixture {
            name: "random text",
            bytes: text.into_bytes(),
            type_tag: "text/plain;charset=ascii",
            format: "PLAIN_LATIN",
            font: "demo_mono",
        });
    }
    fx
}

/// A randomized event graph together with its raw event list, so derived
/// associations can be recomputed independently of the store.
pub struct Graph {
    pub store: OntologyStore,
    pub carriers: Vec<String>,
    pub objects: Vec<String>,
    pub events: Vec<EventRecord>,
}

pub fn random_graph(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = OntologyStore::new();
    let n_carriers = rng.gen_range(1..=3);
    let n_objects = rng.gen_range(1..=3);
    let n_impressions = rng.gen_range(1..=5);
    let n_structures = rng.gen_range(1..=5);

    let mut carriers = Vec::new();
    for i in 0..n_carriers {
        let id = format!("c{i}");
        store
            .register(Entity::new(&id, EntityKind::InformationCarrier))
            .unwrap();
        carriers.push(id);
    }
    let mut objects = Vec::new();
    for i in 0..n_objects {
        let id = format!("d{i}");
        store
            .register(Entity::new(&id, EntityKind::DigitalObject))
            .unwrap();
        objects.push(id);
    }
    let mut impressions = Vec::new();
    for i in 0..n_impressions {
        let id = format!("i{i}");
        store
            .register(Entity::new(&id, EntityKind::SensoryImpression))
            .unwrap();
        impressions.push(id);
    }
    let mut structures = Vec::new();
    for i in 0..n_structures {
        let id = format!("s{i}");
        store
            .register(Entity::new(&id, EntityKind::SymbolStructure))
            .unwrap();
        structures.push(id);
    }

    let n_events = rng.gen_range(3..=20);
    let mut events = Vec::new();
    for e in 0..n_events {
        let id = format!("e{e}");
        let event = match rng.gen_range(0..4) {
            0 => EventRecord::new(&id, EventKind::PhysicalProjection)
                .link(Role::Projected, carriers.choose(&mut rng).unwrap())
                .link(Role::Produced, impressions.choose(&mut rng).unwrap()),
            1 => EventRecord::new(&id, EventKind::DigitalProjection)
                .link(Role::Projected, objects.choose(&mut rng).unwrap())
                .link(Role::Produced, impressions.choose(&mut rng).unwrap()),
            2 => {
                let mut ev = EventRecord::new(&id, EventKind::SignalInterpretation)
                    .link(Role::Interpreted, impressions.choose(&mut rng).unwrap());
                // Interpretation may fail and extract nothing.
                if rng.gen_bool(0.8) {
                    ev = ev.link(Role::Extracted, structures.choose(&mut rng).unwrap());
                }
                ev
            }
            _ => {
                let mut ev = EventRecord::new(&id, EventKind::DigitalInterpretation)
                    .link(Role::Interpreted, objects.choose(&mut rng).unwrap());
                if rng.gen_bool(0.8) {
                    ev = ev.link(Role::Extracted, structures.choose(&mut rng).unwrap());
                }
                ev
            }
        };
        store.record_event(event.clone()).unwrap();
        events.push(event);
    }
    Graph {
        store,
        carriers,
        objects,
        events,
    }
}

/// Brute-force oracle: impressions produced by projections of `subject`.
pub fn oracle_had_projection(
    events: &[EventRecord],
    subject: &str,
    digital: bool,
) -> BTreeSet<String> {
    let want = if digital {
        EventKind::DigitalProjection
    } else {
        EventKind::PhysicalProjection
    };
    let mut out = BTreeSet::new();
    for e in events {
        if e.kind != want {
            continue;
        }
        let projected = e
            .links
            .iter()
            .any(|(r, id)| *r == Role::Projected && id == subject);
        if projected {
            for (r, id) in &e.links {
                if *r == Role::Produced {
                    out.insert(id.clone());
                }
            }
        }
    }
    out
}

/// Brute-force oracle: the two-hop composition of projection and
/// interpretation, plus direct interpretations of digital objects.
pub fn oracle_carries(events: &[EventRecord], subject: &str, digital: bool) -> BTreeSet<String> {
    let impressions = oracle_had_projection(events, subject, digital);
    let mut out = BTreeSet::new();
    for e in events {
        match e.kind {
            EventKind::SignalInterpretation => {
                let hits = e
                    .links
                    .iter()
                    .any(|(r, id)| *r == Role::Interpreted && impressions.contains(id));
                if hits {
                    for (r, id) in &e.links {
                        if *r == Role::Extracted {
                            out.insert(id.clone());
                        }
                    }
                }
            }
            EventKind::DigitalInterpretation if digital => {
                let hits = e
                    .links
                    .iter()
                    .any(|(r, id)| *r == Role::Interpreted && id == subject);
                if hits {
                    for (r, id) in &e.links {
                        if *r == Role::Extracted {
                            out.insert(id.clone());
                        }
                    }
                }
            }
            _ => {}
        }
    }
    out
}
