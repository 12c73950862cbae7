//! Bundled benchmark models and fixtures.

use crate::interface::InterfaceAutomaton;
use crate::purpose::LearningPurpose;
use crate::spec::{parse_model, parse_purpose, LoadedModel, Target};
use crate::sul::{apply_refinement, AsyncModel, CounterSul, RefinementSpec};

pub const ASYNC_TASK: &str = include_str!("../models/async_task.json");
pub const MEDIA_PLAYER: &str = include_str!("../models/media_player.json");
pub const SQLITE_OPEN_HELPER: &str = include_str!("../models/sqlite_open_helper.json");
pub const COIN_FLIP: &str = include_str!("../models/coin_flip.json");
pub const SPEECH_RECOGNIZER: &str = include_str!("../models/speech_recognizer.json");
pub const REQUEST_RESPONSE: &str = include_str!("../models/request_response.json");
pub const ONE_PENDING_PURPOSE: &str = include_str!("../models/one_pending.purpose.json");
pub const DOOR_LOCK: &str = include_str!("../models/door_lock.json");

/// `(file name, contents)` of every bundled model file.
pub const ALL: [(&str, &str); 8] = [
    ("async_task.json", ASYNC_TASK),
    ("media_player.json", MEDIA_PLAYER),
    ("sqlite_open_helper.json", SQLITE_OPEN_HELPER),
    ("coin_flip.json", COIN_FLIP),
    ("speech_recognizer.json", SPEECH_RECOGNIZER),
    ("request_response.json", REQUEST_RESPONSE),
    ("one_pending.purpose.json", ONE_PENDING_PURPOSE),
    ("door_lock.json", DOOR_LOCK),
];

/// Contents of a bundled file by name, with or without the `.json` suffix.
pub fn bundled(name: &str) -> Option<&'static str> {
    ALL.iter()
        .find(|(file, _)| *file == name || file.strip_suffix(".json") == Some(name))
        .map(|(_, text)| *text)
}

fn loaded(text: &str) -> LoadedModel {
    parse_model(text).expect("bundled model is valid")
}

fn async_model(text: &str) -> (AsyncModel, Option<RefinementSpec>) {
    let m = loaded(text);
    match m.target {
        Target::Async(a) => (a, m.refinement),
        _ => unreachable!("bundled model kind"),
    }
}

pub fn async_task() -> InterfaceAutomaton {
    async_model(ASYNC_TASK).0.automaton().clone()
}

pub fn media_player() -> InterfaceAutomaton {
    async_model(MEDIA_PLAYER).0.automaton().clone()
}

pub fn door_lock() -> InterfaceAutomaton {
    async_model(DOOR_LOCK).0.automaton().clone()
}

/// The non-deterministic SQLiteOpenHelper model and its refinement.
pub fn sqlite_open_helper_unrefined() -> (AsyncModel, RefinementSpec) {
    let (m, r) = async_model(SQLITE_OPEN_HELPER);
    (m, r.expect("bundled refinement"))
}

/// SQLiteOpenHelper after splitting the constructor.
pub fn sqlite_open_helper() -> InterfaceAutomaton {
    let (m, r) = sqlite_open_helper_unrefined();
    apply_refinement(&m, &r)
        .expect("bundled refinement applies")
        .automaton()
        .clone()
}

pub fn coin_flip() -> AsyncModel {
    async_model(COIN_FLIP).0
}

pub fn speech_recognizer() -> AsyncModel {
    async_model(SPEECH_RECOGNIZER).0
}

pub fn request_response() -> CounterSul {
    match loaded(REQUEST_RESPONSE).target {
        Target::Counter(c) => c,
        _ => unreachable!("bundled model kind"),
    }
}

pub fn one_pending_purpose() -> LearningPurpose {
    parse_purpose(ONE_PENDING_PURPOSE).expect("bundled purpose is valid")
}

/// Deterministic benchmark automata.
pub fn all_deterministic() -> Vec<InterfaceAutomaton> {
    vec![async_task(), media_player(), sqlite_open_helper(), door_lock()]
}
