//! Generate a synthetic digit corpus as an IDX pair, for trying the CLI
//! without a real dataset:
//!
//! ```text
//! cargo run -p numeral-testkit --example make_corpus -- <dir> [per_class] [seed]
//! ```

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| {
        eprintln!("usage: make_corpus <dir> [per_class] [seed]");
        std::process::exit(1);
    });
    let per_class: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);

    let dir = std::path::PathBuf::from(dir);
    std::fs::create_dir_all(&dir).expect("create output directory");
    let corpus = numeral_testkit::write_synthetic_idx(&dir, per_class, seed).expect("write corpus");
    println!(
        "{} samples\n{}\n{}",
        corpus.count,
        corpus.images_path.display(),
        corpus.labels_path.display()
    );
}
