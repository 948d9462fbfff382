"""Funny-scene extraction from episodic video metadata.

The package turns per-shot visual/text features, laughter tracks,
audio tags, and transcripts into a ranked list of funny scenes:
contrastively trained shot embeddings feed a sliding-window scene
boundary detector; detected scenes are tagged with multimodal humor
evidence, filtered by a content guardrail, scored by a weighted
feature combination, and ranked against curator annotations.
"""

from .corpus import (AudioTagEvent, CuratorAnnotation, LaughterTrack,
                     ManifestError, SceneAnnotation, ShotRecord, Title,
                     TranscriptSentence, fuse_features, load_corpus,
                     load_title, save_title, validate_title)
from .encoder import (EncoderConfig, build_projection_head, cluster_nmi,
                      embed_shots, kmeans, train_encoder)
from .humor_audio import (GuardrailConfig, GuardrailVerdict,
                          LaughterFeatureConfig, guardrail_filter,
                          laughter_features)
from .humor_text import (ExternalScorer, LexiconScorer, OracleScorer,
                         SampledInput, ScorerError, TextScore, make_scorer,
                         sample_train_sentences, score_scene_text,
                         segment_subtexts)
from .metrics import (RankMetricsConfig, average_precision, best_f1,
                      eval_metric, eval_metric_report, match_scenes, nmi,
                      temporal_iou, top_iou, top_iou_align)
from .mining import (HEURISTIC_VARIANTS, InfeasibleVariantError,
                     MiningError, Triplet, load_triplets, mine_guided,
                     mine_heuristic, save_triplets)
from .nnet import (AdamState, LayerSpec, Network, adam_step, gelu,
                   grad_check, l2_normalize, load_matrix, load_network,
                   save_matrix, save_network, softmax_ce, triplet_loss)
from .pipeline import (ConfigError, PipelineConfig, StageError,
                       config_from_dict, load_config, run_all)
from .sbd import (SbdConfig, WindowSample, assemble_scenes, boundary_labels,
                  build_sbd_head, build_windows, predict_boundaries,
                  train_sbd)
from .scoring import (DegenerateFitError, HumorFeatures, RankedScene,
                      ScoreWeights, TitleTrainData, fit_weights_grid,
                      fit_weights_regression, humor_score,
                      normalize_features, rank_scenes)
from .synth import (MARKER_WORDS, PlantedTruth, SynthConfig,
                    generate_corpus, generate_title, load_planted)

__version__ = "0.1.0"
