//! Entity store and event provenance graph.
//!
//! Projection and interpretation operations record events here; the
//! associations `had_projection` and `carries` are derived purely from the
//! event log, never stored. Entities are immutable once registered:
//! altering a carrier (corruption) registers a new entity connected by a
//! `derivedFrom` link.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub type EntityId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityKind {
    InformationCarrier,
    DigitalObject,
    SensoryImpression,
    SymbolStructure,
    InformationFormat,
    SymbolFont,
    SymbolTypeSet,
    ArrangementRuleSet,
    PhysicalProjectionMethod,
    MediaProjectionSoftware,
    SymbolFontEncoding,
    SymbolTypeEncoding,
}

impl EntityKind {
    pub fn name(&self) -> &'static str {
        match self {
            EntityKind::InformationCarrier => "InformationCarrier",
            EntityKind::DigitalObject => "DigitalObject",
            EntityKind::SensoryImpression => "SensoryImpression",
            EntityKind::SymbolStructure => "SymbolStructure",
            EntityKind::InformationFormat => "InformationFormat",
            EntityKind::SymbolFont => "SymbolFont",
            EntityKind::SymbolTypeSet => "SymbolTypeSet",
            EntityKind::ArrangementRuleSet => "ArrangementRuleSet",
            EntityKind::PhysicalProjectionMethod => "PhysicalProjectionMethod",
            EntityKind::MediaProjectionSoftware => "MediaProjectionSoftware",
            EntityKind::SymbolFontEncoding => "SymbolFontEncoding",
            EntityKind::SymbolTypeEncoding => "SymbolTypeEncoding",
        }
    }
}

/// A registered entity. The payload is an opaque reference into whichever
/// module owns the concrete value (e.g. a format id in a FormatRegistry).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub payload: Option<String>,
}

impl Entity {
    pub fn new(id: impl Into<String>, kind: EntityKind) -> Entity {
        Entity {
            id: id.into(),
            kind,
            payload: None,
        }
    }

    pub fn with_payload(mut self, payload: impl Into<String>) -> Entity {
        self.payload = Some(payload.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    PhysicalProjection,
    DigitalProjection,
    SignalInterpretation,
    DigitalInterpretation,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::PhysicalProjection => "PhysicalProjection",
            EventKind::DigitalProjection => "DigitalProjection",
            EventKind::SignalInterpretation => "SignalInterpretation",
            EventKind::DigitalInterpretation => "DigitalInterpretation",
        }
    }

    pub fn from_name(s: &str) -> Option<EventKind> {
        match s {
            "PhysicalProjection" => Some(EventKind::PhysicalProjection),
            "DigitalProjection" => Some(EventKind::DigitalProjection),
            "SignalInterpretation" => Some(EventKind::SignalInterpretation),
            "DigitalInterpretation" => Some(EventKind::DigitalInterpretation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Projected,
    Produced,
    Interpreted,
    Extracted,
    UsedTechnique,
    UsedSoftware,
    UsedFormat,
    UsedFont,
    UsedTypeSet,
    UsedRules,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Projected => "projected",
            Role::Produced => "produced",
            Role::Interpreted => "interpreted",
            Role::Extracted => "extracted",
            Role::UsedTechnique => "usedTechnique",
            Role::UsedSoftware => "usedSoftware",
            Role::UsedFormat => "usedFormat",
            Role::UsedFont => "usedFont",
            Role::UsedTypeSet => "usedTypeSet",
            Role::UsedRules => "usedRules",
        }
    }

    pub fn from_name(s: &str) -> Option<Role> {
        match s {
            "projected" => Some(Role::Projected),
            "produced" => Some(Role::Produced),
            "interpreted" => Some(Role::Interpreted),
            "extracted" => Some(Role::Extracted),
            "usedTechnique" => Some(Role::UsedTechnique),
            "usedSoftware" => Some(Role::UsedSoftware),
            "usedFormat" => Some(Role::UsedFormat),
            "usedFont" => Some(Role::UsedFont),
            "usedTypeSet" => Some(Role::UsedTypeSet),
            "usedRules" => Some(Role::UsedRules),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub id: EntityId,
    pub kind: EventKind,
    pub links: BTreeSet<(Role, EntityId)>,
}

impl EventRecord {
    pub fn new(id: impl Into<String>, kind: EventKind) -> EventRecord {
        EventRecord {
            id: id.into(),
            kind,
            links: BTreeSet::new(),
        }
    }

    pub fn link(mut self, role: Role, id: impl Into<String>) -> EventRecord {
        self.links.insert((role, id.into()));
        self
    }

    pub fn ids_in_role(&self, role: Role) -> Vec<&EntityId> {
        self.links
            .iter()
            .filter(|(r, _)| *r == role)
            .map(|(_, id)| id)
            .collect()
    }
}

/// Intended versus actually used projection and format of a carrier.
/// Both may be present at once and may disagree; a mismatch is a source of
/// additional readings, not an error.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntentMetadata {
    pub intended_projection: Option<EntityId>,
    pub intended_format: Option<EntityId>,
    pub used_format: Option<EntityId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("unknown entity: {0}")]
    UnknownEntity(String),
    #[error("event {event} links unregistered entity {target}")]
    DanglingLink { event: String, target: String },
    #[error("event {event}: {msg}")]
    RoleViolation { event: String, msg: String },
    #[error("malformed event log at line {line}: {msg}")]
    MalformedLog { line: usize, msg: String },
}

#[derive(Debug, Clone, Default)]
pub struct OntologyStore {
    entities: BTreeMap<EntityId, Entity>,
    events: Vec<EventRecord>,
    event_ids: BTreeSet<EntityId>,
    intents: BTreeMap<EntityId, IntentMetadata>,
    derived_from: BTreeMap<EntityId, EntityId>,
}

impl OntologyStore {
    pub fn new() -> OntologyStore {
        OntologyStore::default()
    }

    pub fn register(&mut self, entity: Entity) -> Result<EntityId, OntologyError> {
        if self.entities.contains_key(&entity.id) || self.event_ids.contains(&entity.id) {
            return Err(OntologyError::DuplicateId(entity.id));
        }
        let id = entity.id.clone();
        self.entities.insert(id.clone(), entity);
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<&Entity, OntologyError> {
        self.entities
            .get(id)
            .ok_or_else(|| OntologyError::UnknownEntity(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn record_event(&mut self, event: EventRecord) -> Result<EntityId, OntologyError> {
        if self.event_ids.contains(&event.id) || self.entities.contains_key(&event.id) {
            return Err(OntologyError::DuplicateId(event.id));
        }
        for (_, target) in &event.links {
            if !self.entities.contains_key(target) {
                return Err(OntologyError::DanglingLink {
                    event: event.id.clone(),
                    target: target.clone(),
                });
            }
        }
        self.check_roles(&event)?;
        self.event_ids.insert(event.id.clone());
        let id = event.id.clone();
        self.events.push(event);
        Ok(id)
    }

    fn check_roles(&self, event: &EventRecord) -> Result<(), OntologyError> {
        let violation = |msg: String| OntologyError::RoleViolation {
            event: event.id.clone(),
            msg,
        };
        let exactly_one = |role: Role, kind: EntityKind| -> Result<(), OntologyError> {
            let ids = event.ids_in_role(role);
            if ids.len() != 1 {
                return Err(violation(format!(
                    "needs exactly one {} link, found {}",
                    role.name(),
                    ids.len()
                )));
            }
            let found = self.entities[ids[0]].kind;
            if found != kind {
                return Err(violation(format!(
                    "{} link must be a {}, found {}",
                    role.name(),
                    kind.name(),
                    found.name()
                )));
            }
            Ok(())
        };
        let at_most_one = |role: Role, kind: EntityKind| -> Result<(), OntologyError> {
            let ids = event.ids_in_role(role);
            if ids.len() > 1 {
                return Err(violation(format!(
                    "needs at most one {} link, found {}",
                    role.name(),
                    ids.len()
                )));
            }
            if let Some(id) = ids.first() {
                let found = self.entities[*id].kind;
                if found != kind {
                    return Err(violation(format!(
                        "{} link must be a {}, found {}",
                        role.name(),
                        kind.name(),
                        found.name()
                    )));
                }
            }
            Ok(())
        };
        match event.kind {
            EventKind::PhysicalProjection => {
                exactly_one(Role::Projected, EntityKind::InformationCarrier)?;
                exactly_one(Role::Produced, EntityKind::SensoryImpression)?;
            }
            EventKind::DigitalProjection => {
                exactly_one(Role::Projected, EntityKind::DigitalObject)?;
                exactly_one(Role::Produced, EntityKind::SensoryImpression)?;
            }
            EventKind::SignalInterpretation => {
                exactly_one(Role::Interpreted, EntityKind::SensoryImpression)?;
                at_most_one(Role::Extracted, EntityKind::SymbolStructure)?;
            }
            EventKind::DigitalInterpretation => {
                exactly_one(Role::Interpreted, EntityKind::DigitalObject)?;
                at_most_one(Role::Extracted, EntityKind::SymbolStructure)?;
            }
        }
        Ok(())
    }

    /// Impressions produced by projecting this carrier or digital object.
    pub fn had_projection(&self, carrier: &str) -> Result<BTreeSet<EntityId>, OntologyError> {
        let entity = self.get(carrier)?;
        let want = match entity.kind {
            EntityKind::InformationCarrier => EventKind::PhysicalProjection,
            EntityKind::DigitalObject => EventKind::DigitalProjection,
            _ => return Ok(BTreeSet::new()),
        };
        let mut out = BTreeSet::new();
        for e in &self.events {
            if e.kind == want
                && e.ids_in_role(Role::Projected)
                    .contains(&&carrier.to_string())
            {
                for id in e.ids_in_role(Role::Produced) {
                    out.insert(id.clone());
                }
            }
        }
        Ok(out)
    }

    /// Symbol structures carried by this carrier: everything extracted from
    /// any of its projections, plus (for digital objects) everything
    /// extracted by interpreting the object directly.
    pub fn carries(&self, carrier: &str) -> Result<BTreeSet<EntityId>, OntologyError> {
        let entity = self.get(carrier)?;
        let impressions = self.had_projection(carrier)?;
        let mut out = BTreeSet::new();
        for e in &self.events {
            match e.kind {
                EventKind::SignalInterpretation => {
                    let interpreted = e.ids_in_role(Role::Interpreted);
                    if interpreted.iter().any(|id| impressions.contains(*id)) {
                        for id in e.ids_in_role(Role::Extracted) {
                            out.insert(id.clone());
                        }
                    }
                }
                EventKind::DigitalInterpretation
                    if entity.kind == EntityKind::DigitalObject
                        && e.ids_in_role(Role::Interpreted)
                            .contains(&&carrier.to_string()) =>
                {
                    for id in e.ids_in_role(Role::Extracted) {
                        out.insert(id.clone());
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn set_intent(
        &mut self,
        subject: &str,
        intent: IntentMetadata,
    ) -> Result<(), OntologyError> {
        self.get(subject)?;
        self.intents.insert(subject.to_string(), intent);
        Ok(())
    }

    pub fn intent(&self, subject: &str) -> Option<&IntentMetadata> {
        self.intents.get(subject)
    }

    /// Record that `derived` was produced by altering `source`.
    pub fn link_derived_from(&mut self, derived: &str, source: &str) -> Result<(), OntologyError> {
        self.get(derived)?;
        self.get(source)?;
        self.derived_from
            .insert(derived.to_string(), source.to_string());
        Ok(())
    }

    pub fn derived_from(&self, id: &str) -> Option<&EntityId> {
        self.derived_from.get(id)
    }

    /// Event log as line-delimited text: `kind<TAB>id<TAB>role=id;...`,
    /// links sorted, LF endings. Bit-exact across platforms.
    pub fn export_event_log(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let links: Vec<String> = e
                .links
                .iter()
                .map(|(role, id)| format!("{}={}", role.name(), id))
                .collect();
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                e.kind.name(),
                e.id,
                links.join(";")
            ));
        }
        out
    }

    /// Parse an exported event log back into event records. The caller
    /// replays them through [`OntologyStore::record_event`] against a
    /// store holding the referenced entities.
    pub fn parse_event_log(text: &str) -> Result<Vec<EventRecord>, OntologyError> {
        let mut out = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let malformed = |msg: &str| OntologyError::MalformedLog {
                line: lineno,
                msg: msg.to_string(),
            };
            let mut parts = line.split('\t');
            let kind = parts
                .next()
                .and_then(EventKind::from_name)
                .ok_or_else(|| malformed("unknown event kind"))?;
            let id = parts.next().ok_or_else(|| malformed("missing event id"))?;
            let links_field = parts.next().ok_or_else(|| malformed("missing links"))?;
            if parts.next().is_some() {
                return Err(malformed("trailing fields"));
            }
            let mut event = EventRecord::new(id, kind);
            for pair in links_field.split(';').filter(|p| !p.is_empty()) {
                let (role, target) = pair
                    .split_once('=')
                    .ok_or_else(|| malformed("link must be role=id"))?;
                let role = Role::from_name(role).ok_or_else(|| malformed("unknown role"))?;
                event.links.insert((role, target.to_string()));
            }
            out.push(event);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_with(entities: &[(&str, EntityKind)]) -> OntologyStore {
        let mut s = OntologyStore::new();
        for (id, kind) in entities {
            s.register(Entity::new(*id, *kind)).unwrap();
        }
        s
    }

    #[test]
    fn duplicate_registration_rejected() {
        let mut s = OntologyStore::new();
        s.register(Entity::new("o1", EntityKind::InformationCarrier))
            .unwrap();
        assert_eq!(
            s.register(Entity::new("o1", EntityKind::DigitalObject)),
            Err(OntologyError::DuplicateId("o1".into()))
        );
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn dangling_link_rejected() {
        let mut s = store_with(&[("c1", EntityKind::InformationCarrier)]);
        let e = EventRecord::new("e1", EventKind::PhysicalProjection)
            .link(Role::Projected, "c1")
            .link(Role::Produced, "ghost");
        assert!(matches!(
            s.record_event(e),
            Err(OntologyError::DanglingLink { .. })
        ));
    }

    #[test]
    fn signal_interpretation_allows_at_most_one_extracted() {
        let mut s = store_with(&[
            ("i1", EntityKind::SensoryImpression),
            ("s1", EntityKind::SymbolStructure),
            ("s2", EntityKind::SymbolStructure),
        ]);
        let e = EventRecord::new("e1", EventKind::SignalInterpretation)
            .link(Role::Interpreted, "i1")
            .link(Role::Extracted, "s1")
            .link(Role::Extracted, "s2");
        assert!(matches!(
            s.record_event(e),
            Err(OntologyError::RoleViolation { .. })
        ));
        // Zero extracted links is fine: interpretation may fail.
        let e =
            EventRecord::new("e2", EventKind::SignalInterpretation).link(Role::Interpreted, "i1");
        s.record_event(e).unwrap();
    }

    #[test]
    fn carries_composes_projection_and_interpretation() {
        let mut s = store_with(&[
            ("o2", EntityKind::InformationCarrier),
            ("i2", EntityKind::SensoryImpression),
            ("s_plain", EntityKind::SymbolStructure),
            ("fmt", EntityKind::InformationFormat),
        ]);
        s.record_event(
            EventRecord::new("scan", EventKind::PhysicalProjection)
                .link(Role::Projected, "o2")
                .link(Role::Produced, "i2"),
        )
        .unwrap();
        assert_eq!(s.carries("o2").unwrap(), BTreeSet::new());
        s.record_event(
            EventRecord::new("ocr", EventKind::SignalInterpretation)
                .link(Role::Interpreted, "i2")
                .link(Role::Extracted, "s_plain")
                .link(Role::UsedFormat, "fmt"),
        )
        .unwrap();
        assert_eq!(s.had_projection("o2").unwrap(), ["i2".to_string()].into());
        assert_eq!(s.carries("o2").unwrap(), ["s_plain".to_string()].into());
    }

    #[test]
    fn two_projections_of_one_carrier_both_count() {
        // The palimpsest case: daylight and infrared scans of the same
        // carrier yield different impressions and different structures.
        let mut s = store_with(&[
            ("c", EntityKind::InformationCarrier),
            ("i_day", EntityKind::SensoryImpression),
            ("i_ir", EntityKind::SensoryImpression),
            ("s_day", EntityKind::SymbolStructure),
            ("s_ir", EntityKind::SymbolStructure),
        ]);
        for (ev, imp, st) in [("p1", "i_day", "s_day"), ("p2", "i_ir", "s_ir")] {
            s.record_event(
                EventRecord::new(ev, EventKind::PhysicalProjection)
                    .link(Role::Projected, "c")
                    .link(Role::Produced, imp),
            )
            .unwrap();
            s.record_event(
                EventRecord::new(format!("int_{ev}"), EventKind::SignalInterpretation)
                    .link(Role::Interpreted, imp)
                    .link(Role::Extracted, st),
            )
            .unwrap();
        }
        assert_eq!(
            s.had_projection("c").unwrap(),
            ["i_day".to_string(), "i_ir".to_string()].into()
        );
        assert_eq!(
            s.carries("c").unwrap(),
            ["s_day".to_string(), "s_ir".to_string()].into()
        );
    }

    #[test]
    fn digital_object_carries_via_direct_interpretation() {
        let mut s = store_with(&[
            ("d1", EntityKind::DigitalObject),
            ("s1", EntityKind::SymbolStructure),
        ]);
        s.record_event(
            EventRecord::new("e1", EventKind::DigitalInterpretation)
                .link(Role::Interpreted, "d1")
                .link(Role::Extracted, "s1"),
        )
        .unwrap();
        assert_eq!(s.carries("d1").unwrap(), ["s1".to_string()].into());
    }

    #[test]
    fn event_log_round_trips() {
        let mut s = store_with(&[
            ("c", EntityKind::InformationCarrier),
            ("i", EntityKind::SensoryImpression),
            ("s", EntityKind::SymbolStructure),
        ]);
        s.record_event(
            EventRecord::new("e1", EventKind::PhysicalProjection)
                .link(Role::Projected, "c")
                .link(Role::Produced, "i"),
        )
        .unwrap();
        s.record_event(
            EventRecord::new("e2", EventKind::SignalInterpretation)
                .link(Role::Interpreted, "i")
                .link(Role::Extracted, "s"),
        )
        .unwrap();
        let log = s.export_event_log();
        let replayed = OntologyStore::parse_event_log(&log).unwrap();
        assert_eq!(replayed, s.events);

        let mut s2 = store_with(&[
            ("c", EntityKind::InformationCarrier),
            ("i", EntityKind::SensoryImpression),
            ("s", EntityKind::SymbolStructure),
        ]);
        for e in replayed {
            s2.record_event(e).unwrap();
        }
        assert_eq!(s2.export_event_log(), log);
        assert_eq!(s2.carries("c").unwrap(), s.carries("c").unwrap());
    }

    #[test]
    fn intent_and_used_format_may_differ() {
        let mut s = store_with(&[
            ("c", EntityKind::InformationCarrier),
            ("f_intended", EntityKind::InformationFormat),
            ("f_used", EntityKind::InformationFormat),
        ]);
        s.set_intent(
            "c",
            IntentMetadata {
                intended_projection: None,
                intended_format: Some("f_intended".into()),
                used_format: Some("f_used".into()),
            },
        )
        .unwrap();
        let i = s.intent("c").unwrap();
        assert_ne!(i.intended_format, i.used_format);
    }
}
