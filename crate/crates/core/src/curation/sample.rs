use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{kmeans, leading_sentences, CandidatePair, CurationError, SimilarityProvider};

/// Candidates considered per frame.
pub const CANDIDATE_CAP: usize = 250;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Selected pairs, sorted by id.
    pub selected: Vec<CandidatePair>,
    pub warnings: Vec<String>,
}

/// Fills missing embeddings from the provider, embedding the first five
/// sentences of each source text. Pairs that already carry a vector are
/// left alone.
pub fn attach_embeddings<P: SimilarityProvider + ?Sized>(
    pool: &mut [CandidatePair],
    provider: &P,
) -> Result<(), CurationError> {
    let fetched: Vec<Result<Option<Vec<f64>>, CurationError>> = pool
        .par_iter()
        .map(|pair| {
            if pair.embedding.is_some() {
                return Ok(None);
            }
            let text = leading_sentences(pair.source_text.as_deref().unwrap_or(""), 5);
            Ok(Some(provider.embed(&pair.source, text)?))
        })
        .collect();
    for (pair, got) in pool.iter_mut().zip(fetched) {
        if let Some(vector) = got? {
            pair.embedding = Some(vector);
        }
    }
    Ok(())
}

/// Maximum bipartite matching of clusters to lemmas by augmenting paths.
/// `options[c]` lists cluster `c`'s lemma ids in preference order.
fn match_lemmas(options: &[Vec<usize>], lemma_count: usize) -> Vec<Option<usize>> {
    fn augment(
        c: usize,
        options: &[Vec<usize>],
        owner: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &l in &options[c] {
            if visited[l] {
                continue;
            }
            visited[l] = true;
            if owner[l].is_none_or(|other| augment(other, options, owner, visited)) {
                owner[l] = Some(c);
                return true;
            }
        }
        false
    }

    let mut owner: Vec<Option<usize>> = vec![None; lemma_count];
    for c in 0..options.len() {
        let mut visited = vec![false; lemma_count];
        augment(c, options, &mut owner, &mut visited);
    }
    let mut chosen = vec![None; options.len()];
    for (l, c) in owner.iter().enumerate() {
        if let Some(c) = c {
            chosen[*c] = Some(l);
        }
    }
    chosen
}

/// Clusters the pool into `min(draws, |pool|)` groups by embedding and picks
/// one pair per cluster, choosing pairs so that as many distinct trigger
/// lemmas as possible are represented. Within a cluster, candidates are
/// visited in a seeded shuffle of id order.
pub fn stratified_sample(
    pool: &[CandidatePair],
    draws: usize,
    seed: u64,
) -> Result<Sample, CurationError> {
    if pool.is_empty() {
        return Err(CurationError::EmptyPool);
    }
    let mut warnings = Vec::new();
    let mut sorted: Vec<&CandidatePair> = pool.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.dedup_by(|a, b| a.id == b.id);

    let k = draws.min(sorted.len());
    if draws > sorted.len() {
        warnings.push(format!(
            "requested {draws} pairs but the pool has only {}; returning all",
            sorted.len()
        ));
    }
    if k == 0 {
        return Ok(Sample {
            selected: Vec::new(),
            warnings,
        });
    }

    let vectors: Vec<Vec<f64>> = sorted
        .iter()
        .map(|p| {
            p.embedding
                .clone()
                .ok_or_else(|| CurationError::MissingEmbedding(p.id.clone()))
        })
        .collect::<Result<_, _>>()?;
    let clusters = kmeans(&vectors, k, seed)?.cluster_members();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let visiting: Vec<Vec<usize>> = clusters
        .into_iter()
        .map(|mut members| {
            members.shuffle(&mut rng);
            members
        })
        .collect();

    let mut lemma_ids: HashMap<&str, usize> = HashMap::new();
    let options: Vec<Vec<usize>> = visiting
        .iter()
        .map(|members| {
            let mut opts = Vec::new();
            for &m in members {
                let next = lemma_ids.len();
                let id = *lemma_ids.entry(sorted[m].lemma.as_str()).or_insert(next);
                if !opts.contains(&id) {
                    opts.push(id);
                }
            }
            opts
        })
        .collect();
    let matched = match_lemmas(&options, lemma_ids.len());

    let mut selected: Vec<CandidatePair> = visiting
        .iter()
        .zip(&matched)
        .map(|(members, lemma)| {
            let pick = match lemma {
                Some(l) => members
                    .iter()
                    .copied()
                    .find(|&m| lemma_ids[sorted[m].lemma.as_str()] == *l)
                    .expect("matched lemma occurs in its cluster"),
                None => members[0],
            };
            sorted[pick].clone()
        })
        .collect();
    selected.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Sample { selected, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(id: &str, lemma: &str, v: Vec<f64>) -> CandidatePair {
        CandidatePair {
            id: id.into(),
            frame: "F".into(),
            report: format!("r-{id}"),
            source: format!("s-{id}"),
            lemma: lemma.into(),
            embedding: Some(v),
            source_text: None,
        }
    }

    #[test]
    fn whole_pool_when_draws_equal_size() {
        let pool: Vec<_> = (0..5).map(|i| pair(&format!("p{i}"), "x", vec![i as f64])).collect();
        let s = stratified_sample(&pool, 5, 1).unwrap();
        assert_eq!(s.selected.len(), 5);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn oversized_request_is_clamped_with_warning() {
        let pool: Vec<_> = (0..3).map(|i| pair(&format!("p{i}"), "x", vec![i as f64])).collect();
        let s = stratified_sample(&pool, 10, 1).unwrap();
        assert_eq!(s.selected.len(), 3);
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn prefers_distinct_lemmas() {
        // Cluster A near the origin holds {run, run}; cluster B far away
        // holds {run, walk}. The only selections are (run, run) and
        // (run, walk); the second has more distinct lemmas.
        let pool = vec![
            pair("a1", "run", vec![0.0, 0.0]),
            pair("a2", "run", vec![0.1, 0.0]),
            pair("b1", "run", vec![10.0, 10.0]),
            pair("b2", "walk", vec![10.1, 10.0]),
        ];
        for seed in 0..20 {
            let s = stratified_sample(&pool, 2, seed).unwrap();
            let mut lemmas: Vec<&str> = s.selected.iter().map(|p| p.lemma.as_str()).collect();
            lemmas.sort_unstable();
            assert_eq!(lemmas, vec!["run", "walk"], "seed {seed}");
            assert!(s.selected.iter().any(|p| p.id.starts_with('a')));
            assert!(s.selected.iter().any(|p| p.id == "b2"));
        }
    }

    #[test]
    fn missing_embedding_is_an_error() {
        let mut p = pair("a", "x", vec![0.0]);
        p.embedding = None;
        assert!(matches!(
            stratified_sample(&[p], 1, 0),
            Err(CurationError::MissingEmbedding(id)) if id == "a"
        ));
        assert!(matches!(stratified_sample(&[], 1, 0), Err(CurationError::EmptyPool)));
    }

    #[test]
    fn embeddings_come_from_provider() {
        let mut provider = super::super::FileProvider::new();
        provider.insert_embedding("s-a", vec![3.0]);
        let mut p = pair("a", "x", vec![]);
        p.embedding = None;
        p.source_text = Some("One. Two.".into());
        let mut pool = vec![p, pair("b", "y", vec![1.0])];
        attach_embeddings(&mut pool, &provider).unwrap();
        assert_eq!(pool[0].embedding, Some(vec![3.0]));
        assert_eq!(pool[1].embedding, Some(vec![1.0]));
    }

    proptest! {
        #[test]
        fn size_uniqueness_and_determinism(
            n in 1usize..30, draws in 1usize..40, seed in any::<u64>(),
            coords in prop::collection::vec(-3.0f64..3.0, 60),
        ) {
            let lemmas = ["run", "walk", "go", "hit"];
            let pool: Vec<_> = (0..n)
                .map(|i| pair(&format!("p{i:02}"), lemmas[i % 4], vec![coords[2 * i], coords[2 * i + 1]]))
                .collect();
            let a = stratified_sample(&pool, draws, seed).unwrap();
            prop_assert_eq!(a.selected.len(), draws.min(n));
            let mut ids: Vec<&str> = a.selected.iter().map(|p| p.id.as_str()).collect();
            ids.dedup();
            prop_assert_eq!(ids.len(), draws.min(n));
            prop_assert_eq!(&a, &stratified_sample(&pool, draws, seed).unwrap());
        }
    }
}
