mod common;

use common::*;
use pitchseq::models::{MlpConfig, ModelConfig, Network, TransformerConfig};

#[test]
fn every_op_matches_central_differences() {
    for (op, worst) in op_checks() {
        assert!(worst < 1e-6, "{op}: relative error {worst:e}");
    }
}

#[test]
fn narrow_mlp_every_scalar() {
    let cfg = MlpConfig {
        d_embed: 6,
        hidden: 12,
        ..MlpConfig::new(20, 3)
    };
    let mut net = Network::<f64>::new(ModelConfig::Mlp(cfg), 5).unwrap();
    let (c, t) = random_batch(&mut rng(6), 5, 3, 20);
    let s = check_network(&mut net, &c, &t, every);
    assert_eq!(s.checked, cfg.count_parameters());
    assert!(s.worst < 1e-4, "{s:?}");
}

#[test]
fn two_block_transformer_every_scalar() {
    let cfg = TransformerConfig {
        d_model: 8,
        heads: 2,
        blocks: 2,
        ffn_hidden: 12,
        ..TransformerConfig::small(15, 4)
    };
    let mut net = Network::<f64>::new(ModelConfig::Transformer(cfg), 9).unwrap();
    let (c, t) = random_batch(&mut rng(10), 3, 4, 15);
    let s = check_network(&mut net, &c, &t, every);
    assert_eq!(s.checked, cfg.count_parameters());
    assert!(s.worst < 1e-4, "{s:?}");
}
