#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use qmeasure::{BeamsplitterParams, Event, History, HistorySpace, HopperModel, StepRole};

pub fn splitter(phi: impl Strategy<Value = f64>) -> impl Strategy<Value = BeamsplitterParams> {
    (0.0f64..=1.0, phi).prop_map(|(t, phi)| BeamsplitterParams::from_transmission(t, phi).unwrap())
}

pub fn role() -> impl Strategy<Value = StepRole> {
    prop_oneof![
        Just(StepRole::ReflectKeeps),
        Just(StepRole::ReflectSwitches)
    ]
}

fn with_roles(steps: Vec<BeamsplitterParams>, roles: Vec<StepRole>) -> HopperModel {
    let n = steps.len();
    HopperModel::new(steps)
        .unwrap()
        .with_role_table(roles.into_iter().take(n).collect())
        .unwrap()
}

/// Arbitrary chains of 1..=4 splitters with arbitrary phases and roles.
pub fn model() -> impl Strategy<Value = HopperModel> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(splitter(-3.2f64..3.2), n),
            prop::collection::vec(role(), n),
        )
            .prop_map(|(s, r)| with_roles(s, r))
    })
}

/// Chains whose step matrices are unitary: real `t` requires `φ = ±π/2`.
pub fn lossless_model() -> impl Strategy<Value = HopperModel> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(splitter(prop_oneof![Just(FRAC_PI_2), Just(-FRAC_PI_2)]), n),
            prop::collection::vec(role(), n),
        )
            .prop_map(|(s, r)| with_roles(s, r))
    })
}

/// A random subset of the model's history space.
pub fn event_of(model: &HopperModel, mask: u64) -> Event {
    let space = model.history_space().unwrap();
    subset(&space, mask)
}

pub fn subset(space: &HistorySpace, mask: u64) -> Event {
    let picked: Vec<History> = space
        .histories()
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, h)| *h)
        .collect();
    Event::new(picked).unwrap()
}
