use textcode::linear::{LinearClassifier, SvmConfig};
use textcode::model_file::{ModelFile, StoredModel};

fn docs() -> (Vec<Vec<String>>, Vec<usize>) {
    let words = [["RED", "APPLE"], ["BLUE", "SKY"], ["GREEN", "GRASS"]];
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..30 {
        let k = i % 3;
        let filler = format!("W{}", i % 7);
        docs.push(vec![words[k][i % 2].to_string(), filler, "THE".to_string()]);
        labels.push(k);
    }
    (docs, labels)
}

#[test]
fn separable_tokens_are_learned_and_saved() {
    let (docs, labels) = docs();
    let cfg = SvmConfig { c: 1.0, epochs: 20, seed: 3 };
    let (clf, objective) = LinearClassifier::fit(&docs, &labels, 3, 2, &cfg).unwrap();
    assert!(objective.last().unwrap() < objective.first().unwrap());
    for (d, &y) in docs.iter().zip(&labels) {
        assert_eq!(clf.predict(d), y);
    }
    let file = ModelFile::new(StoredModel::Linear(clf.clone()), vec!["r".into(), "b".into(), "g".into()]).unwrap();
    let back = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
    let StoredModel::Linear(loaded) = back.model else { panic!("not linear") };
    assert_eq!(loaded.scores(&docs[4]), clf.scores(&docs[4]));
}

#[test]
fn same_seed_same_model() {
    let (docs, labels) = docs();
    let cfg = SvmConfig { c: 0.5, epochs: 5, seed: 9 };
    let a = LinearClassifier::fit(&docs, &labels, 3, 1, &cfg).unwrap().0;
    let b = LinearClassifier::fit(&docs, &labels, 3, 1, &cfg).unwrap().0;
    assert_eq!(a.scores(&docs[0]), b.scores(&docs[0]));
}
