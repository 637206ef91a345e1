"""Word vector models and their evaluation.

Neural embeddings (skip-gram and CBOW with negative sampling or hierarchical
softmax), a sparse count-based PPMI model, phrase detection, analogy and
word-intrusion evaluation, dataset generation, and hyperparameter sweeps.
"""

from .corpus import (Corpus, PhraseConfig, PreprocessOptions, Vocabulary,
                     build_vocab, detect_phrases, load_corpus, phrase_score,
                     read_corpus_file, split_sentences, subsample_keep_prob,
                     tokenize, write_corpus_file)
from .datasets import (AnalogyQuestion, IntrusionQuestion, IntrusionTriple,
                       TaskDefinitions, generate_analogy_questions,
                       generate_intrusion_questions, parse_analogy_file,
                       parse_definitions, parse_intrusion_file,
                       write_analogy_file, write_intrusion_file)
from .embeddings import (PRESETS, EmbeddingModel, HuffmanTree, TrainingConfig,
                         UnigramTable, build_huffman, build_unigram_table,
                         cosine, load_binary, load_text, save_binary, save_text,
                         train, train_step, update_model)
from .errors import ConfigError, EmbedlabError, FormatError, OovError
from .evaluation import (AnalogyMethod, EvalReport, FrequencyAnalysis,
                         emit_report, eval_analogies, eval_intrusion,
                         find_intruder, frequency_analysis, frequency_bin,
                         parse_report_jsonl, solve_analogy, summarize_report)
from .gridsearch import (GridResult, GridSpec, config_id, expand_grid,
                         read_results, run_grid, summarize_grid)
from .ppmi import (CooccurrenceMatrix, SparsePpmiModel, count_cooccurrences,
                   load_ppmi, ppmi_most_similar, save_ppmi, to_ppmi)

__version__ = "0.1.0"

__all__ = [
    "AnalogyMethod", "AnalogyQuestion", "ConfigError", "CooccurrenceMatrix",
    "Corpus", "EmbedlabError", "EmbeddingModel", "EvalReport", "FormatError",
    "FrequencyAnalysis", "GridResult", "GridSpec", "HuffmanTree",
    "IntrusionQuestion", "IntrusionTriple", "OovError", "PRESETS",
    "PhraseConfig", "PreprocessOptions", "SparsePpmiModel", "TaskDefinitions",
    "TrainingConfig", "UnigramTable", "Vocabulary", "build_huffman",
    "build_unigram_table", "build_vocab", "config_id", "cosine",
    "count_cooccurrences", "detect_phrases", "emit_report", "eval_analogies",
    "eval_intrusion", "expand_grid", "find_intruder", "frequency_analysis",
    "frequency_bin", "generate_analogy_questions", "generate_intrusion_questions",
    "load_binary", "load_corpus", "load_ppmi", "load_text", "parse_analogy_file",
    "parse_definitions", "parse_intrusion_file", "parse_report_jsonl",
    "phrase_score", "ppmi_most_similar", "read_corpus_file", "read_results",
    "run_grid", "save_binary", "save_ppmi", "save_text", "solve_analogy",
    "split_sentences", "subsample_keep_prob", "summarize_grid",
    "summarize_report", "tokenize", "train", "train_step", "update_model",
    "write_analogy_file", "write_corpus_file", "write_intrusion_file",
]
