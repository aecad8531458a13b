"""readease: readability scoring evaluated against eye-tracking reading ease.

Scores text with traditional formulas, psycholinguistic word measures and
LLM annotations, turns raw fixation reports into reading-ease measures, and
evaluates every method by its content-controlled correlation with the
reading facilitation produced by text simplification.
"""

from .corpus import (Corpus, CorpusError, ParallelPair, TextUnit, Token,
                     corpus_stats, count_syllables, load_corpus,
                     segment_sentences, tokenize)
from .eye_measures import (MEASURES, EaseTable, FixationError, Trial,
                           average_over_participants, ingest_fixations,
                           segment_passes, trial_measures)
from .formulas import (FORMULA_METHODS, FormulaError, FormulaScore, ari,
                       coleman_liau, compute_formula, dale_chall,
                       flesch_kincaid, flesch_reading_ease, gunning_fog,
                       load_easy_words)
from .stats import (CorrelationResult, DeltaRecord, StatError, SteigerResult,
                    bootstrap_ci, compare_groups, compare_methods,
                    compute_deltas, correlation_pvalue, evaluate_uncontrolled,
                    fit_r_vs_perplexity, pearson, spearman, steiger_test,
                    welch_ttest)
from .word_measures import (FrequencyTable, MeasureError, MeasureStore,
                            UnitScore, frequency_surprisal, word_length)

__version__ = "0.1.0"
