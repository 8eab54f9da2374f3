//! Joint coloring classes and the connectivity condition that makes the
//! receiver's decoder well defined.
//!
//! Inside a joint color class two support points are neighbours when they
//! differ in exactly one coordinate. The condition holds when every class is
//! connected under this relation, or its components all carry the same
//! function value.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::model::JointModel;

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyPoint {
    pub cell: usize,
    pub coords: Vec<usize>,
    pub value: u64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorClass {
    pub colors: Vec<usize>,
    /// Support points of the class, ascending by coordinates.
    pub points: Vec<FamilyPoint>,
    /// Component id of each point, numbered by first appearance.
    pub component: Vec<usize>,
    pub components: usize,
}

impl ColorClass {
    pub fn mass(&self) -> f64 {
        self.points.iter().map(|p| p.prob).sum()
    }
}

/// Partition of the support by joint color tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct JointColoringFamily {
    pub classes: Vec<ColorClass>,
}

impl JointColoringFamily {
    pub fn class_of(&self, colors: &[usize]) -> Option<&ColorClass> {
        self.classes
            .binary_search_by(|c| c.colors.as_slice().cmp(colors))
            .ok()
            .map(|i| &self.classes[i])
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn joint_coloring_family(model: &JointModel, colorings: &[Coloring]) -> Result<JointColoringFamily> {
    joint_coloring_family_on(model, colorings, |_| true)
}

/// Family over the support points accepted by `keep`.
pub fn joint_coloring_family_on(
    model: &JointModel,
    colorings: &[Coloring],
    keep: impl Fn(usize) -> bool,
) -> Result<JointColoringFamily> {
    if colorings.len() != model.k() {
        return Err(Error::invalid(
            "colorings",
            format!("{} colorings for {} sources", colorings.len(), model.k()),
        ));
    }
    for (i, c) in colorings.iter().enumerate() {
        if c.len() != model.alphabets()[i] {
            return Err(Error::invalid(
                "colorings",
                format!("coloring {} covers {} symbols, alphabet has {}", i + 1, c.len(), model.alphabets()[i]),
            ));
        }
    }
    let mut groups: BTreeMap<Vec<usize>, Vec<FamilyPoint>> = BTreeMap::new();
    for cell in model.support() {
        if !keep(cell) {
            continue;
        }
        let coords = model.coords(cell);
        let colors: Vec<usize> = coords.iter().zip(colorings).map(|(&x, c)| c.color(x)).collect();
        groups.entry(colors).or_default().push(FamilyPoint {
            cell,
            coords,
            value: model.values()[cell],
            prob: model.pmf()[cell],
        });
    }
    let k = model.k();
    let classes = groups
        .into_iter()
        .map(|(colors, points)| {
            let mut parent: Vec<usize> = (0..points.len()).collect();
            for i in 0..k {
                let mut by_rest: HashMap<Vec<usize>, usize> = HashMap::new();
                for (idx, p) in points.iter().enumerate() {
                    let mut rest = p.coords.clone();
                    rest[i] = usize::MAX;
                    match by_rest.get(&rest) {
                        Some(&first) => {
                            let (a, b) = (find(&mut parent, first), find(&mut parent, idx));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                            }
                        }
                        None => {
                            by_rest.insert(rest, idx);
                        }
                    }
                }
            }
            let mut ids = HashMap::new();
            let component: Vec<usize> = (0..points.len())
                .map(|idx| {
                    let r = find(&mut parent, idx);
                    let next = ids.len();
                    *ids.entry(r).or_insert(next)
                })
                .collect();
            ColorClass {
                colors,
                components: ids.len(),
                points,
                component,
            }
        })
        .collect();
    Ok(JointColoringFamily { classes })
}

/// Two points of one class that the receiver cannot tell apart but must.
#[derive(Debug, Clone, PartialEq)]
pub struct CccWitness {
    pub colors: Vec<usize>,
    pub a: Vec<usize>,
    pub a_value: u64,
    pub b: Vec<usize>,
    pub b_value: u64,
}

impl fmt::Display for CccWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = |v: &[usize]| {
            let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("({})", s.join(","))
        };
        write!(
            f,
            "class {}: {} f={} vs {} f={}",
            t(&self.colors),
            t(&self.a),
            self.a_value,
            t(&self.b),
            self.b_value
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CccVerdict {
    Satisfied,
    Violated(CccWitness),
}

impl CccVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CccVerdict::Satisfied)
    }
}

/// Checks the connectivity condition. Fails with [`Error::InvalidColoring`]
/// when two neighbouring points in one class have different values, which
/// means some coloring merges adjacent vertices.
pub fn satisfies_ccc(family: &JointColoringFamily) -> Result<CccVerdict> {
    let mut first_failure = None;
    for class in &family.classes {
        let mut comp_value: Vec<Option<u64>> = vec![None; class.components];
        for (p, &c) in class.points.iter().zip(&class.component) {
            match comp_value[c] {
                None => comp_value[c] = Some(p.value),
                Some(v) if v != p.value => {
                    return Err(Error::InvalidColoring(invalid_detail(class, c)));
                }
                _ => {}
            }
        }
        if first_failure.is_some() || comp_value.iter().all(|v| *v == comp_value[0]) {
            continue;
        }
        'pairs: for (i, a) in class.points.iter().enumerate() {
            for (j, b) in class.points.iter().enumerate().skip(i + 1) {
                if class.component[i] != class.component[j] && a.value != b.value {
                    first_failure = Some(CccWitness {
                        colors: class.colors.clone(),
                        a: a.coords.clone(),
                        a_value: a.value,
                        b: b.coords.clone(),
                        b_value: b.value,
                    });
                    break 'pairs;
                }
            }
        }
    }
    Ok(match first_failure {
        Some(w) => CccVerdict::Violated(w),
        None => CccVerdict::Satisfied,
    })
}

fn invalid_detail(class: &ColorClass, comp: usize) -> String {
    let pts: Vec<&FamilyPoint> = class
        .points
        .iter()
        .zip(&class.component)
        .filter(|(_, &c)| c == comp)
        .map(|(p, _)| p)
        .collect();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let diff: Vec<usize> = (0..a.coords.len()).filter(|&t| a.coords[t] != b.coords[t]).collect();
            if diff.len() == 1 && a.value != b.value {
                let t = diff[0];
                return format!(
                    "source {} symbols {} and {} share a color but are adjacent (context {:?})",
                    t + 1,
                    a.coords[t],
                    b.coords[t],
                    a.coords
                );
            }
        }
    }
    "adjacent symbols share a color".into()
}

/// Support-level zigzag property for two sources: for any two support points
/// at least one of the two crossed points is also in the support.
pub fn check_zigzag(model: &JointModel) -> Result<bool> {
    if model.k() != 2 {
        return Err(Error::invalid("sources", "the zigzag check needs exactly two sources"));
    }
    let (n1, n2) = (model.alphabets()[0], model.alphabets()[1]);
    let inside = |a: usize, b: usize| model.pmf()[a * n2 + b] > 0.0;
    let support: Vec<(usize, usize)> = (0..n1 * n2)
        .filter(|&c| model.pmf()[c] > 0.0)
        .map(|c| (c / n2, c % n2))
        .collect();
    for (i, &(a1, a2)) in support.iter().enumerate() {
        for &(b1, b2) in &support[i + 1..] {
            if !inside(a1, b2) && !inside(b1, a2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Receiver decoder: joint color tuple to function value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LookupTable {
    pub map: BTreeMap<Vec<usize>, u64>,
}

impl LookupTable {
    pub fn decode(&self, colors: &[usize]) -> Option<u64> {
        self.map.get(colors).copied()
    }
    pub fn len(&self) -> usize {
        self.map.len()
    }
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Builds the decoder, or reports the first class whose points disagree.
pub fn build_lookup(family: &JointColoringFamily) -> std::result::Result<LookupTable, CccWitness> {
    let mut map = BTreeMap::new();
    for class in &family.classes {
        let first = &class.points[0];
        if let Some(other) = class.points.iter().find(|p| p.value != first.value) {
            return Err(CccWitness {
                colors: class.colors.clone(),
                a: first.coords.clone(),
                a_value: first.value,
                b: other.coords.clone(),
                b_value: other.value,
            });
        }
        map.insert(class.colors.clone(), first.value);
    }
    Ok(LookupTable { map })
}

/// Decoder that guesses the value of the most likely point in each class.
/// Only exact when the connectivity condition holds.
pub fn build_lookup_lenient(family: &JointColoringFamily) -> LookupTable {
    let map = family
        .classes
        .iter()
        .map(|c| {
            let best = c
                .points
                .iter()
                .fold(&c.points[0], |b, p| if p.prob > b.prob { p } else { b });
            (c.colors.clone(), best.value)
        })
        .collect();
    LookupTable { map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    fn example2() -> JointModel {
        Scenario::from_fn(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5], |c| c[0] as u32)
            .unwrap()
            .model(0)
            .unwrap()
    }

    #[test]
    fn diagonal_support_fails() {
        let m = example2();
        let fam = joint_coloring_family(&m, &[Coloring::single(2), Coloring::single(2)]).unwrap();
        assert_eq!(fam.classes.len(), 1);
        assert_eq!(fam.classes[0].components, 2);
        match satisfies_ccc(&fam).unwrap() {
            CccVerdict::Violated(w) => {
                assert_eq!((w.a.clone(), w.b.clone()), (vec![0, 0], vec![1, 1]));
                assert_eq!(w.to_string(), "class (0,0): (0,0) f=0 vs (1,1) f=1");
            }
            v => panic!("{v:?}"),
        }
        assert!(build_lookup(&fam).is_err());
        assert!(!check_zigzag(&m).unwrap());
    }

    #[test]
    fn trivial_side_satisfies() {
        let m = example2();
        let fam = joint_coloring_family(&m, &[Coloring::single(2), Coloring::trivial(2)]).unwrap();
        assert!(satisfies_ccc(&fam).unwrap().holds());
        let lut = build_lookup(&fam).unwrap();
        assert_eq!(lut.decode(&[0, 1]), Some(1));
    }

    #[test]
    fn merged_neighbours_are_reported() {
        let m = Scenario::from_fn(vec![2, 2], vec![0.25; 4], |c| (c[0] ^ c[1]) as u32)
            .unwrap()
            .model(0)
            .unwrap();
        let fam = joint_coloring_family(&m, &[Coloring::single(2), Coloring::trivial(2)]).unwrap();
        assert!(matches!(satisfies_ccc(&fam), Err(Error::InvalidColoring(_))));
    }
}
