use log::warn;

use super::embedding::EmbeddingModel;
use super::tokenize::Vocabulary;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpansionReport {
    pub keywords_found: usize,
    pub missing_keywords: Vec<String>,
}

/// Union the keywords with their `k` nearest embedding neighbors.
///
/// Keywords come first in the returned vocabulary (in input order), followed
/// by neighbors in keyword order and decreasing cosine similarity. Keywords
/// unknown to the model are skipped.
pub fn expand_vocabulary<S: AsRef<str>>(
    model: &EmbeddingModel,
    keywords: &[S],
    k: usize,
) -> (Vocabulary, ExpansionReport) {
    let mut report = ExpansionReport::default();
    let mut found = Vec::new();
    let mut vocab = Vocabulary::new();
    for kw in keywords {
        let kw = kw.as_ref();
        match model.vocabulary.lookup(kw) {
            Some(idx) => {
                if !vocab.contains(kw) {
                    found.push(idx);
                }
                vocab.insert(kw.to_string());
            }
            None => {
                if !report.missing_keywords.iter().any(|m| m == kw) {
                    warn!("keyword `{kw}` not in embedding vocabulary; skipped");
                    report.missing_keywords.push(kw.to_string());
                }
            }
        }
    }
    report.keywords_found = found.len();

    for &idx in &found {
        for (neighbor, _) in model.nearest(idx, k) {
            vocab.insert(model.vocabulary.word(neighbor).to_string());
        }
    }
    (vocab, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Unit vectors at the given angles (degrees) in the plane.
    fn planar(words: &[&str], angles: &[f64]) -> EmbeddingModel {
        let vocab = Vocabulary::from_tokens(words.iter().copied());
        let input: Vec<f64> = angles
            .iter()
            .flat_map(|a| {
                let r = a.to_radians();
                [r.cos(), r.sin()]
            })
            .collect();
        let output = vec![0.0; input.len()];
        EmbeddingModel::from_vectors(vocab, 2, input, output).unwrap()
    }

    #[test]
    fn picks_highest_cosine_neighbors() {
        let model = planar(&["key", "near", "mid", "far", "opposite"], &[0.0, 10.0, 40.0, 90.0, 180.0]);
        let (vocab, report) = expand_vocabulary(&model, &["key"], 2);
        assert_eq!(vocab.tokens(), ["key", "near", "mid"]);
        assert_eq!(report.keywords_found, 1);
    }

    #[test]
    fn zero_neighbors_is_keyword_set() {
        let model = planar(&["a", "b", "c"], &[0.0, 5.0, 10.0]);
        let (vocab, _) = expand_vocabulary(&model, &["c", "a"], 0);
        assert_eq!(vocab.tokens(), ["c", "a"]);
    }

    #[test]
    fn neighbor_that_is_a_keyword_appears_once() {
        let model = planar(&["a", "b", "c"], &[0.0, 5.0, 90.0]);
        let (vocab, _) = expand_vocabulary(&model, &["a", "b"], 1);
        assert_eq!(vocab.tokens(), ["a", "b"]);
    }

    #[test]
    fn unknown_keyword_is_skipped() {
        let model = planar(&["a", "b"], &[0.0, 5.0]);
        let (vocab, report) = expand_vocabulary(&model, &["zzz", "a"], 1);
        assert_eq!(vocab.tokens(), ["a", "b"]);
        assert_eq!(report.missing_keywords, vec!["zzz".to_string()]);
    }

    #[test]
    fn size_bound_and_superset() {
        let angles: Vec<f64> = (0..12).map(|i| i as f64 * 29.0).collect();
        let words: Vec<String> = (0..12).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let model = planar(&refs, &angles);
        let keywords = ["w0", "w3", "w7", "nope"];
        for k in 0..5 {
            let (vocab, _) = expand_vocabulary(&model, &keywords, k);
            assert!(vocab.len() <= keywords.len() * (k + 1));
            for kw in ["w0", "w3", "w7"] {
                assert!(vocab.contains(kw));
            }
        }
    }
}
