//! Seeded random models for property checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;

use super::group::{ElemId, FiniteGroup, GroupKind, Subgroup};
use super::model::{build_model, FiniteGroupModel};

/// Group families sampled by [`random_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Z/n`, `1 <= n <= 24`.
    Cyclic,
    /// `S_n`, `1 <= n <= 6`.
    Symmetric,
    /// `GL_2(Z/n)`, `2 <= n <= 5`.
    Gl2,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Cyclic, Family::Symmetric, Family::Gl2];

    pub fn sample_kind<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupKind {
        match self {
            Family::Cyclic => GroupKind::Cyclic(rng.gen_range(1..=24)),
            Family::Symmetric => GroupKind::Symmetric(rng.gen_range(1..=6)),
            Family::Gl2 => GroupKind::Gl2(rng.gen_range(2..=5)),
        }
    }
}

/// Builds each group once and hands out shared references.
#[derive(Debug, Default)]
pub struct GroupLibrary {
    groups: Mutex<HashMap<GroupKind, Arc<FiniteGroup>>>,
}

impl GroupLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: GroupKind) -> Result<Arc<FiniteGroup>> {
        if let Some(g) = self
            .groups
            .lock()
            .expect("group library poisoned")
            .get(&kind)
        {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(FiniteGroup::new(kind)?);
        Ok(Arc::clone(
            self.groups
                .lock()
                .expect("group library poisoned")
                .entry(kind)
                .or_insert(g),
        ))
    }
}

fn random_gens<R: Rng + ?Sized>(group: &FiniteGroup, rng: &mut R) -> Vec<ElemId> {
    let count = rng.gen_range(0..=2);
    (0..count)
        .map(|_| rng.gen_range(0..group.order()))
        .collect()
}

/// `Γ`, `K` generated by up to two random elements each; `π` uniform in the
/// normalizer of `K`.
pub fn random_model_in<R: Rng + ?Sized>(
    group: Arc<FiniteGroup>,
    rng: &mut R,
) -> Result<FiniteGroupModel> {
    let gamma = random_gens(&group, rng);
    let k = random_gens(&group, rng);
    let normalizer = Subgroup::generated(&group, &k).normalizer(&group);
    let pi = *normalizer.choose(rng).expect("normalizer contains e");
    build_model(group, &gamma, &k, pi)
}

pub fn random_model<R: Rng + ?Sized>(
    library: &GroupLibrary,
    family: Family,
    rng: &mut R,
) -> Result<FiniteGroupModel> {
    let kind = family.sample_kind(rng);
    random_model_in(library.get(kind)?, rng)
}
