//! Synonym clustering: verbs sharing at least one synset merge into one
//! cluster (connected components of the shared-synset graph). The synset
//! table is a plain data file with the same word→synsets shape a WordNet
//! lookup would produce.

use crate::segment::DemoSegment;
use crate::MinerError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

/// word -> synset ids. File format: one entry per line,
/// `word synset1 synset2 ...`; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, synsets: impl IntoIterator<Item = String>) {
        let set: BTreeSet<String> = synsets.into_iter().collect();
        if !set.is_empty() {
            self.entries.insert(word.to_lowercase(), set);
        }
    }

    pub fn synsets(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&word.to_lowercase())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, MinerError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| MinerError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let mut table = Self::new();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-empty line has a first token");
            let synsets: Vec<String> = parts.map(str::to_string).collect();
            if synsets.is_empty() {
                return Err(MinerError::Malformed {
                    path: path.display().to_string(),
                    detail: format!("line {}: word `{word}` has no synsets", lineno + 1),
                });
            }
            table.insert(word, synsets);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A group of synonymous verbs with the demonstrations they cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbCluster {
    pub canonical_verb: String,
    pub members: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<DemoSegment>,
    pub frequency: u64,
}

/// Cluster verbs into connected components of the shared-synset graph.
///
/// The input list carries multiplicity: a verb appearing three times
/// contributes 3 to its cluster's frequency. The canonical verb is the
/// highest-frequency member, ties broken by lexicographic order. Verbs
/// absent from the table become singletons. Output is ordered by
/// (frequency desc, canonical asc) and is deterministic.
pub fn cluster_synonyms(verbs: &[String], table: &SynonymTable) -> Vec<VerbCluster> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for verb in verbs {
        *counts.entry(verb.to_lowercase()).or_insert(0) += 1;
    }

    // synset -> verbs carrying it
    let mut by_synset: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for verb in counts.keys() {
        if let Some(synsets) = table.synsets(verb) {
            for synset in synsets {
                by_synset.entry(synset).or_default().push(verb);
            }
        }
    }

    let mut assigned: BTreeSet<&str> = BTreeSet::new();
    let mut clusters = Vec::new();
    for start in counts.keys() {
        if assigned.contains(start.as_str()) {
            continue;
        }
        let mut component: BTreeSet<&str> = BTreeSet::new();
        let mut queue = VecDeque::from([start.as_str()]);
        while let Some(verb) = queue.pop_front() {
            if !component.insert(verb) {
                continue;
            }
            assigned.insert(verb);
            if let Some(synsets) = table.synsets(verb) {
                for synset in synsets {
                    if let Some(neighbors) = by_synset.get(synset.as_str()) {
                        for neighbor in neighbors {
                            if !component.contains(neighbor) {
                                queue.push_back(neighbor);
                            }
                        }
                    }
                }
            }
        }

        let frequency: u64 = component.iter().map(|v| counts[*v]).sum();
        let canonical = component
            .iter()
            .max_by(|a, b| counts[**a].cmp(&counts[**b]).then(b.cmp(a)))
            .expect("component is non-empty")
            .to_string();
        clusters.push(VerbCluster {
            canonical_verb: canonical,
            members: component.iter().map(|v| v.to_string()).collect(),
            segments: Vec::new(),
            frequency,
        });
    }

    clusters.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.canonical_verb.cmp(&b.canonical_verb))
    });
    clusters
}

/// Cluster tagged demonstrations: each (verb, segment) pair feeds its verb's
/// cluster, whose segments end up concatenated in corpus order.
pub fn cluster_segments(tagged: Vec<(String, DemoSegment)>, table: &SynonymTable) -> Vec<VerbCluster> {
    let verbs: Vec<String> = tagged.iter().map(|(v, _)| v.clone()).collect();
    let mut clusters = cluster_synonyms(&verbs, table);
    for (verb, segment) in tagged {
        let folded = verb.to_lowercase();
        if let Some(cluster) = clusters.iter_mut().find(|c| c.members.contains(&folded)) {
            cluster.segments.push(segment);
        }
    }
    clusters
}
