use std::collections::HashMap;
use std::sync::Arc;

use super::{Element, MarkedGroup};
use crate::error::{Error, Result};

/// The elements of word length at most `radius`, in BFS order.
#[derive(Debug, Clone)]
pub struct Ball {
    group: Arc<MarkedGroup>,
    radius: u32,
    elements: Vec<Element>,
    lengths: Vec<u32>,
    /// `sphere_starts[r]` is the index of the first element of length `r`;
    /// the vector has `radius + 2` entries.
    sphere_starts: Vec<usize>,
    index: HashMap<Element, u32>,
}

/// Enumerates the ball of radius `r` by BFS along edges `x → s·x`.
///
/// Fails with a resource error instead of truncating when the group's
/// element cap would be exceeded.
pub fn ball(group: &Arc<MarkedGroup>, r: u32) -> Result<Ball> {
    let cap = group.max_elements();
    let id = group.identity();
    let mut elements = vec![id.clone()];
    let mut lengths = vec![0];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut sphere_starts = vec![0, 1];
    for len in 1..=r {
        let (lo, hi) = (sphere_starts[len as usize - 1], sphere_starts[len as usize]);
        for i in lo..hi {
            for s in group.steps() {
                let y = group.mul(s, &elements[i]);
                if index.contains_key(&y) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::Resource {
                        what: format!("ball of radius {r} in {}", group.spec()),
                        cap,
                    });
                }
                index.insert(y.clone(), elements.len() as u32);
                elements.push(y);
                lengths.push(len);
            }
        }
        sphere_starts.push(elements.len());
    }
    Ok(Ball {
        group: group.clone(),
        radius: r,
        elements,
        lengths,
        sphere_starts,
        index,
    })
}

impl Ball {
    pub fn group(&self) -> &Arc<MarkedGroup> {
        &self.group
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn length(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    /// Index range of the elements of length at most `r`.
    pub fn within(&self, r: u32) -> std::ops::Range<usize> {
        0..self.sphere_starts[r.min(self.radius) as usize + 1]
    }

    /// Index range of the sphere of radius `r`.
    pub fn sphere(&self, r: u32) -> std::ops::Range<usize> {
        if r > self.radius {
            return 0..0;
        }
        self.sphere_starts[r as usize]..self.sphere_starts[r as usize + 1]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Ball indices of `s·x` for each Cayley step `s`, when inside the ball.
    pub fn left_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let x = &self.elements[i];
        self.group
            .steps()
            .iter()
            .filter_map(move |s| self.index_of(&self.group.mul(s, x)))
    }
}
