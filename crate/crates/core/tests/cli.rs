use std::path::Path;
use std::process::{Command, Output};

const SMALL: &[&str] = &[
    "--scanlines",
    "16",
    "--samples",
    "32",
    "--mgc_order",
    "8",
    "--n_utterances",
    "12",
    "--reduced_scanlines",
    "16",
    "--reduced_samples",
    "32",
    "--mlp.hidden_layers",
    "1",
    "--mlp.hidden_width",
    "16",
    "--mlp.max_epochs",
    "3",
    "--mlp.warmup_epochs",
    "1",
    "--duration.hidden_layers",
    "1",
    "--duration.hidden_width",
    "8",
    "--duration.max_epochs",
    "3",
    "--duration.warmup_epochs",
    "1",
];

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultratts"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .unwrap()
}

fn stage(dir: &Path, name: &str, extra: &[&str]) -> Output {
    let mut args = vec![name];
    args.extend_from_slice(extra);
    args.extend_from_slice(SMALL);
    run(dir, &args)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_version_succeed_and_usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
    assert_eq!(code(&run(dir.path(), &["--version"])), 0);
    assert_eq!(code(&run(dir.path(), &["synthesize", "--help"])), 0);
    assert_eq!(code(&run(dir.path(), &[])), 1);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&run(dir.path(), &["prepare", "--no_such_setting", "3"])), 1);
    assert_eq!(code(&run(dir.path(), &["prepare", "--seed", "3"])), 1);
    assert_eq!(code(&run(dir.path(), &["prepare", "--variance_target", "1.5"])), 1);
    // nothing to prepare
    assert_eq!(code(&run(dir.path(), &["prepare"])), 1);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[corpus]\nn_utterances = 9\nspeaker = \"fromfile\"\n").unwrap();
    let o = run(dir.path(), &["--config", "c.toml", "gen-corpus", "--scanlines", "8", "--samples", "8", "--speaker", "flag"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let index = std::fs::read_to_string(dir.path().join("corpus/flag/utterances.tsv")).unwrap();
    assert_eq!(index.lines().count(), 9);
    let bad = run(dir.path(), &["--config", "missing.toml", "gen-corpus"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn full_run_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (name, extra) in [
        ("gen-corpus", vec![]),
        ("prepare", vec![]),
        ("train", vec![]),
        ("evaluate", vec![]),
        ("synthesize", vec!["--reference", "synth_0003", "--out", "out", "--name", "r"]),
    ] {
        let o = stage(d, name, &extra);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let prep = stage(d, "prepare", &[]);
    assert!(String::from_utf8_lossy(&prep.stdout).contains("(paper: 128)"));

    let o = run(d, &["export-video", "--input", "out/r.ult", "--out", "video"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("video/manifest.tsv").is_file());
    let o = run(
        d,
        &["plot-coeffs", "--original", "out/r.ultpca.fmtx", "--prediction", "same=out/r.ultpca.fmtx", "--dims", "1,2", "--out", "p.tsv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let header = std::fs::read_to_string(d.join("p.tsv")).unwrap();
    assert!(header.starts_with("time\toriginal_1\tsame_1\toriginal_2\tsame_2\n"));

    // lstm was never trained
    let o = stage(d, "synthesize", &["--text", "x", "--kind", "lstm"]);
    assert_eq!(code(&o), 1);
    // unknown reference utterance
    let o = stage(d, "synthesize", &["--reference", "nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn data_and_numerical_failures_have_their_own_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&stage(d, "gen-corpus", &[])), 0);
    assert_eq!(code(&stage(d, "prepare", &[])), 0);
    let o = stage(d, "train", &["--mlp.base_lr", "1e9"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));

    let ult = d.join("corpus/synth/synth_0002.ult");
    let bytes = std::fs::read(&ult).unwrap();
    std::fs::write(&ult, &bytes[..bytes.len() - 1]).unwrap();
    let o = stage(d, "prepare", &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("synth_0002"));

    std::fs::write(d.join("junk.ult"), [0u8; 10]).unwrap();
    std::fs::write(d.join("junk.param"), "scanlines=4\nsamples=4\nfps=10\n").unwrap();
    assert_eq!(code(&run(d, &["export-video", "--input", "junk.ult", "--out", "v"])), 2);
}
