use std::time::Duration;

use polyw::constructors::{
    construct_f2_no_isolated, construct_from_tn, construct_height_one, construct_isolated_b,
    nonpolygonality_follower_obstruction, ConstructError, FollowerEvidence,
};
use polyw::invariants::{has_no_isolated_generators, rho, tn_membership};
use polyw::search::{decide_polygonal, SearchBounds, SearchOutcome};
use polyw::{CyclicWord, PolygonalityCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Strategy {
    Auto,
    Tn,
    F2,
    IsolatedB,
    HeightOne,
    Search,
}

pub enum Outcome {
    Polygonal { strategy: &'static str, certificate: Box<PolygonalityCertificate> },
    NotPolygonal(FollowerEvidence),
    NotApplicable(String),
    Inconclusive(SearchOutcome),
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Polygonal { .. } => 0,
            Outcome::NotPolygonal(_) => 1,
            Outcome::NotApplicable(_) | Outcome::Inconclusive(_) => 2,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Polygonal { .. } => "polygonal",
            Outcome::NotPolygonal(_) => "not-polygonal",
            Outcome::NotApplicable(_) => "not-applicable",
            Outcome::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Outcome::Polygonal { certificate, .. } => certificate.to_json_value(),
            Outcome::NotPolygonal(ev) => serde_json::json!({"status": self.status(), "obstruction": ev}),
            Outcome::NotApplicable(why) => serde_json::json!({"status": self.status(), "reason": why}),
            Outcome::Inconclusive(out) => serde_json::json!({"status": self.status(), "search": out}),
        }
    }
}

fn tn(w: &CyclicWord) -> Result<PolygonalityCertificate, ConstructError> {
    if !has_no_isolated_generators(w) {
        return Err(ConstructError::NotApplicable("the word has an isolated generator".into()));
    }
    match tn_membership(&rho(w))? {
        Some(cert) => construct_from_tn(w, &cert),
        None => Err(ConstructError::NotApplicable("ρ(w) is not in T_n".into())),
    }
}

type Constructor = fn(&CyclicWord) -> Result<PolygonalityCertificate, ConstructError>;

const CONSTRUCTORS: [(&str, Constructor); 4] = [
    ("tn", tn),
    ("f2", construct_f2_no_isolated),
    ("isolated-b", construct_isolated_b),
    ("height-one", construct_height_one),
];

fn search(w: &CyclicWord, bounds: &SearchBounds) -> Outcome {
    match decide_polygonal(w, bounds) {
        SearchOutcome::Found { certificate } => Outcome::Polygonal { strategy: "search", certificate },
        other => Outcome::Inconclusive(other),
    }
}

pub fn run(w: &CyclicWord, strategy: Strategy, bounds: &SearchBounds) -> Outcome {
    let single = |name: &str| {
        let (name, f) = CONSTRUCTORS.iter().find(|(n, _)| *n == name).expect("known strategy");
        match f(w) {
            Ok(c) => Outcome::Polygonal { strategy: name, certificate: Box::new(c) },
            Err(e) => Outcome::NotApplicable(e.to_string()),
        }
    };
    match strategy {
        Strategy::Tn => single("tn"),
        Strategy::F2 => single("f2"),
        Strategy::IsolatedB => single("isolated-b"),
        Strategy::HeightOne => single("height-one"),
        Strategy::Search => search(w, bounds),
        Strategy::Auto => {
            if let Some(c) = PolygonalityCertificate::proper_power(w) {
                return Outcome::Polygonal { strategy: "proper-power", certificate: Box::new(c) };
            }
            if let Some(ev) = nonpolygonality_follower_obstruction(w) {
                return Outcome::NotPolygonal(ev);
            }
            for (name, f) in CONSTRUCTORS {
                if let Ok(c) = f(w) {
                    return Outcome::Polygonal { strategy: name, certificate: Box::new(c) };
                }
            }
            search(w, bounds)
        }
    }
}

pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(10);
