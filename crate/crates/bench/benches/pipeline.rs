use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use formulary_bench::{clean_repo, plain_inputs};
use formulary_core::math::{canonical, parse_str};
use formulary_core::replace::rewrite_document;
use formulary_core::search::parse_query;
use formulary_core::translate::export;
use formulary_core::{CasTarget, ExportFormat, SearchIndex};

fn parsing(c: &mut Criterion) {
    let repo = clean_repo();
    let sources: Vec<&str> = repo.records.iter().map(|r| r.canonical_tex.as_str()).collect();
    c.bench_function("parse corpus", |b| {
        b.iter(|| {
            for s in &sources {
                black_box(parse_str(s, &repo.table).unwrap());
            }
        })
    });
    c.bench_function("canonical corpus", |b| {
        b.iter(|| {
            for r in &repo.records {
                black_box(canonical(&r.ast));
            }
        })
    });
}

fn searching(c: &mut Criterion) {
    let repo = clean_repo();
    c.bench_function("build index", |b| b.iter(|| black_box(SearchIndex::build(&repo.records))));
    let index = SearchIndex::build(&repo.records);
    let query = parse_query("macro:JacobiP hypergeometric tex:\"\\frac{1-x}{2}\"", &repo.table).unwrap();
    c.bench_function("execute query", |b| b.iter(|| black_box(index.execute(&query, 10))));
}

fn exporting(c: &mut Criterion) {
    let repo = clean_repo();
    for (name, format) in [("mathml", ExportFormat::Mathml), ("mathematica", ExportFormat::Cas(CasTarget::Mathematica))] {
        c.bench_function(&format!("export {name}"), |b| {
            b.iter(|| {
                for r in &repo.records {
                    let _ = black_box(export(r, format, &repo.table));
                }
            })
        });
    }
}

fn rewriting(c: &mut Criterion) {
    let (text, rules) = plain_inputs();
    c.bench_function("rewrite plain corpus", |b| b.iter(|| black_box(rewrite_document(&text, &rules, 10).unwrap())));
}

criterion_group!(benches, parsing, searching, exporting, rewriting);
criterion_main!(benches);
