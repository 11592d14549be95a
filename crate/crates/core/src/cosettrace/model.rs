use std::sync::Arc;

use crate::error::{Error, Result};

use super::group::{ElemId, FiniteGroup, Subgroup};

/// A finite group `G` with subgroups `Γ`, `K` and an element `π` normalizing
/// `K`. `Γ` plays the rational points, `K` the level subgroup.
#[derive(Clone, Debug)]
pub struct FiniteGroupModel {
    group: Arc<FiniteGroup>,
    gamma: Subgroup,
    k: Subgroup,
    pi: ElemId,
}

impl FiniteGroupModel {
    pub fn new(group: Arc<FiniteGroup>, gamma: Subgroup, k: Subgroup, pi: ElemId) -> Result<Self> {
        if pi >= group.order() {
            return Err(Error::invalid("π is not an element of G"));
        }
        if !k.is_normalized_by(&group, pi) {
            return Err(Error::invalid(format!(
                "π = {} does not normalize K",
                group.format(pi)
            )));
        }
        Ok(Self {
            group,
            gamma,
            k,
            pi,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn shared_group(&self) -> Arc<FiniteGroup> {
        Arc::clone(&self.group)
    }

    pub fn gamma(&self) -> &Subgroup {
        &self.gamma
    }

    pub fn k(&self) -> &Subgroup {
        &self.k
    }

    pub fn pi(&self) -> ElemId {
        self.pi
    }

    /// Same `G`, `Γ`, `π` with a different level subgroup.
    pub fn with_k(&self, k: Subgroup) -> Result<Self> {
        Self::new(Arc::clone(&self.group), self.gamma.clone(), k, self.pi)
    }

    /// Membership mask of the coset `πK`.
    pub(crate) fn pi_k_mask(&self) -> Vec<bool> {
        let g = &*self.group;
        let pi_inv = g.inv(self.pi);
        g.elements()
            .map(|y| self.k.contains(g.mul(pi_inv, y)))
            .collect()
    }
}

/// Builds a model from generator lists.
pub fn build_model(
    group: Arc<FiniteGroup>,
    gamma_gens: &[ElemId],
    k_gens: &[ElemId],
    pi: ElemId,
) -> Result<FiniteGroupModel> {
    let n = group.order();
    if gamma_gens.iter().chain(k_gens).any(|&x| x >= n) {
        return Err(Error::invalid("generator is not an element of G"));
    }
    let gamma = Subgroup::generated(&group, gamma_gens);
    let k = Subgroup::generated(&group, k_gens);
    FiniteGroupModel::new(group, gamma, k, pi)
}

/// `Γ\G/K` with the translation `[x] -> [xπ]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetSpace {
    /// Smallest element index of each double coset.
    pub representatives: Vec<ElemId>,
    /// Element -> double coset number.
    pub membership: Vec<usize>,
    /// Double coset of `xπ` for each double coset of `x`.
    pub hecke_action: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl DoubleCosetSpace {
    pub fn new(m: &FiniteGroupModel) -> Result<Self> {
        let g = m.group();
        let mut membership = vec![usize::MAX; g.order()];
        let mut representatives = Vec::new();
        let mut sizes = Vec::new();
        for x in g.elements() {
            if membership[x] != usize::MAX {
                continue;
            }
            let id = representatives.len();
            representatives.push(x);
            let mut size = 0;
            for &gam in m.gamma().members() {
                let gx = g.mul(gam, x);
                for &k in m.k().members() {
                    let y = g.mul(gx, k);
                    if membership[y] == usize::MAX {
                        membership[y] = id;
                        size += 1;
                    }
                }
            }
            sizes.push(size);
        }
        let hecke_action: Vec<usize> = representatives
            .iter()
            .map(|&x| membership[g.mul(x, m.pi())])
            .collect();
        let mut hit = vec![false; hecke_action.len()];
        for &c in &hecke_action {
            if std::mem::replace(&mut hit[c], true) {
                return Err(Error::violation(
                    "translation by π is not a bijection on Γ\\G/K",
                ));
            }
        }
        Ok(Self {
            representatives,
            membership,
            hecke_action,
            sizes,
        })
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn fixed_points(&self) -> usize {
        self.hecke_action
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i == j)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosettrace::group::GroupKind;

    fn group(kind: GroupKind) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::new(kind).unwrap())
    }

    #[test]
    fn build_examples() {
        let s3 = group(GroupKind::Symmetric(3));
        let p = |s: &str| s3.parse_element(s).unwrap();
        assert!(build_model(s3.clone(), &[p("(12)")], &[], s3.identity()).is_ok());
        let err = build_model(s3.clone(), &[], &[p("(12)")], p("(13)"));
        assert!(matches!(err, Err(Error::InvalidArgument(_))));

        let z4 = group(GroupKind::Cyclic(4));
        let m = build_model(z4.clone(), &[2], &[], 2).unwrap();
        assert_eq!(m.gamma().order(), 2);
        assert!(build_model(z4, &[7], &[], 0).is_err());
    }

    #[test]
    fn cosets_partition_group() {
        let g = group(GroupKind::Symmetric(4));
        let p = |s: &str| g.parse_element(s).unwrap();
        let m = build_model(g.clone(), &[p("(1234)")], &[p("(12)")], p("(12)")).unwrap();
        let space = DoubleCosetSpace::new(&m).unwrap();
        assert_eq!(space.sizes.iter().sum::<usize>(), 24);
        assert!(space.membership.iter().all(|&c| c < space.len()));
    }
}
