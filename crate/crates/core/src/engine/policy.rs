use crate::theory::{Branch, Choice, LawId};

/// Rule picking which applicable law a tree node expands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Lowest applicable law id.
    Canonical,
    /// Highest applicable law id.
    Reverse,
    /// Pseudo-random pick, a pure function of the seed and the node.
    Seeded(u64),
    /// Follows the story's law order while the node lies on the story,
    /// canonical (or reverse) order once off it.
    StoryConsistent {
        story: Vec<Choice>,
        reverse_off_branch: bool,
    },
}

impl OrderPolicy {
    pub fn story(branch: &Branch) -> Self {
        OrderPolicy::StoryConsistent {
            story: branch.steps().to_vec(),
            reverse_off_branch: false,
        }
    }

    /// `applicable` is nonempty and sorted; `path` is the choices leading
    /// to the node.
    pub(crate) fn select(&self, applicable: &[LawId], path: &[Choice], state: &[bool], applied: &[bool]) -> LawId {
        debug_assert!(!applicable.is_empty());
        match self {
            OrderPolicy::Canonical => applicable[0],
            OrderPolicy::Reverse => applicable[applicable.len() - 1],
            OrderPolicy::Seeded(seed) => {
                let mut h = splitmix(*seed);
                for (i, b) in state.iter().chain(applied.iter()).enumerate() {
                    if *b {
                        h = splitmix(h ^ (i as u64 + 1));
                    }
                }
                applicable[(h % applicable.len() as u64) as usize]
            }
            OrderPolicy::StoryConsistent {
                story,
                reverse_off_branch,
            } => {
                let on_branch = path.len() < story.len() && story[..path.len()] == *path;
                match on_branch {
                    true if applicable.contains(&story[path.len()].law) => story[path.len()].law,
                    _ if *reverse_off_branch => applicable[applicable.len() - 1],
                    _ => applicable[0],
                }
            }
        }
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
