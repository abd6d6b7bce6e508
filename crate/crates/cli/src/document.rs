//! The resolved form of a definition file.

use std::collections::BTreeMap;

use cofinite::relations::Partition;
use cofinite::topograph::{FinGraph, GraphMap};
use cofinite::uniformity::CofinitePresentation;

/// One named definition. References are stored by name so that printing
/// reproduces them; resolved values are kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub enum Def {
    Graph(FinGraph),
    Partition {
        graph: String,
        partition: Partition,
    },
    Map {
        from: String,
        to: String,
        map: GraphMap,
    },
    Presentation {
        graph: String,
        base_refs: Vec<String>,
        presentation: CofinitePresentation,
    },
    System(SystemDecl),
}

/// A system is either a compiled-in builtin or an explicit level/bond list;
/// the chain system itself is assembled on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemDecl {
    Builtin(String),
    Explicit {
        levels: Vec<String>,
        bonds: Vec<String>,
    },
}

impl Def {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Def::Graph(_) => "graph",
            Def::Partition { .. } => "partition",
            Def::Map { .. } => "map",
            Def::Presentation { .. } => "presentation",
            Def::System(_) => "system",
        }
    }

    /// Rank used for canonical printing order; every reference points to a
    /// strictly smaller rank, so printed documents always re-resolve.
    pub fn rank(&self) -> u8 {
        match self {
            Def::Graph(_) => 0,
            Def::Partition { .. } => 1,
            Def::Map { .. } => 2,
            Def::Presentation { .. } => 3,
            Def::System(_) => 4,
        }
    }
}

/// A parsed and resolved definition file. Names are unique; equality
/// ignores source positions and definition order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub defs: BTreeMap<String, Def>,
}

impl Document {
    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Def> {
        self.defs.get(name)
    }

    pub fn graph(&self, name: &str) -> Option<&FinGraph> {
        match self.defs.get(name) {
            Some(Def::Graph(g)) => Some(g),
            _ => None,
        }
    }

    pub fn partition(&self, name: &str) -> Option<(&str, &Partition)> {
        match self.defs.get(name) {
            Some(Def::Partition { graph, partition }) => Some((graph.as_str(), partition)),
            _ => None,
        }
    }

    pub fn map(&self, name: &str) -> Option<&GraphMap> {
        match self.defs.get(name) {
            Some(Def::Map { map, .. }) => Some(map),
            _ => None,
        }
    }

    pub fn presentation(&self, name: &str) -> Option<&CofinitePresentation> {
        match self.defs.get(name) {
            Some(Def::Presentation { presentation, .. }) => Some(presentation),
            _ => None,
        }
    }

    /// Definitions in canonical order: by kind rank, then by name.
    pub fn ordered(&self) -> Vec<(&String, &Def)> {
        let mut defs: Vec<(&String, &Def)> = self.defs.iter().collect();
        defs.sort_by_key(|(name, def)| (def.rank(), (*name).clone()));
        defs
    }
}
