use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::Corpus;

pub const DEFAULT_CAP_WORDS: u64 = 25_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    pub corpus: Corpus,
    /// Indices of the kept input documents, ascending.
    pub kept: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Random subset of whole documents with at most `cap_words` words.
///
/// Documents are visited in a seeded shuffle and taken whenever they still
/// fit; the output keeps the input order. When the first visited document
/// alone exceeds the cap, it is returned on its own.
pub fn sample_split(split: &Corpus, cap_words: u64, exempt: bool, seed: u64) -> Sampled {
    let all: Vec<usize> = (0..split.documents.len()).collect();
    if exempt {
        return Sampled { corpus: split.clone(), kept: all, warnings: Vec::new() };
    }
    let mut order = all;
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let words = |i: usize| split.documents[i].word_count() as u64;
    let mut warnings = Vec::new();
    let mut kept = Vec::new();
    match order.first() {
        Some(&first) if words(first) > cap_words => {
            warnings.push(alloc::format!(
                "document {} alone has {} words, above the cap of {cap_words}; kept on its own",
                split.documents[first].doc_id,
                words(first)
            ));
            kept.push(first);
        }
        _ => {
            let mut total = 0;
            for i in order {
                if total + words(i) <= cap_words {
                    total += words(i);
                    kept.push(i);
                }
            }
        }
    }
    kept.sort_unstable();
    let corpus = Corpus { documents: kept.iter().map(|&i| split.documents[i].clone()).collect() };
    Sampled { corpus, kept, warnings }
}
