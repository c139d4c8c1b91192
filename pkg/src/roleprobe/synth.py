"""Synthetic English-like treebank generator for mock-embedder pipelines.

Sentences are simple transitive clauses built from fixed vocabulary lists.
Noun lemmas are partitioned into an "agent" and a "patient" pool by the
sign of their mock lexical prior (a seeded hash), so a probe trained on
mock static embeddings recovers the pool, and minority-role uses (a patient
word as subject, an agent word as object) become the non-prototypical
instances. Template geometry varies the linear distance between arguments
and the verb, which controls how often local scrambling flips their order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .conllu import Sentence, parse_conllu
from .errors import ConfigError
from .mock import lexical_prior

NOUNS = (
    "chef", "onion", "girl", "hand", "teacher", "student", "doctor", "nurse",
    "farmer", "baker", "painter", "driver", "singer", "dancer", "writer",
    "reader", "hunter", "keeper", "guard", "clerk", "judge", "lawyer",
    "tailor", "barber", "sailor", "pilot", "soldier", "scout", "coach",
    "player", "runner", "walker", "helper", "leader", "worker", "builder",
    "miner", "porter", "waiter", "vendor", "trader", "banker", "broker",
    "dealer", "agent", "editor", "author", "poet", "artist", "actor",
    "dog", "cat", "bird", "horse", "cow", "sheep", "goat", "pig", "duck",
    "goose", "rabbit", "mouse", "fox", "wolf", "bear", "deer", "lion",
    "tiger", "monkey", "camel", "donkey", "otter", "beaver", "badger",
    "crow", "raven", "owl", "hawk", "eagle", "swan", "heron", "finch",
    "window", "door", "table", "chair", "bench", "shelf", "ladder", "wall",
    "floor", "roof", "gate", "fence", "bridge", "tower", "cabin", "barn",
    "shed", "mill", "well", "oven", "stove", "kettle", "pan", "pot",
    "plate", "bowl", "cup", "glass", "bottle", "jar", "basket", "box",
    "crate", "barrel", "sack", "bag", "rope", "chain", "wire", "nail",
    "hammer", "saw", "drill", "wrench", "shovel", "rake", "broom", "brush",
    "apple", "pear", "plum", "peach", "grape", "lemon", "melon", "berry",
    "carrot", "potato", "tomato", "pepper", "bean", "pea", "corn", "wheat",
    "bread", "cake", "pie", "soup", "stew", "salad", "cheese", "butter",
    "river", "lake", "pond", "stream", "hill", "valley", "cliff", "cave",
    "field", "meadow", "forest", "grove", "path", "road", "trail", "track",
    "letter", "book", "page", "card", "note", "map", "chart", "photo",
    "poster", "ticket", "coin", "stamp", "ring", "crown", "sword", "shield",
    "arrow", "spear", "drum", "flute", "violin", "piano", "bell", "horn",
    "cart", "wagon", "sled", "boat", "canoe", "raft", "truck", "tractor",
    "engine", "wheel", "anchor", "sail", "mast", "oar", "net", "hook",
    "garden", "orchard", "vineyard", "pasture", "stable", "kennel", "nest",
    "blanket", "pillow", "carpet", "curtain", "mirror", "candle", "lantern",
    "basin", "bucket", "tub", "towel", "soap", "comb", "needle", "thread",
)

VERBS = (
    ("saw", "see"), ("chased", "chase"), ("praised", "praise"),
    ("carried", "carry"), ("lifted", "lift"), ("found", "find"),
    ("washed", "wash"), ("painted", "paint"), ("kicked", "kick"),
    ("pushed", "push"), ("pulled", "pull"), ("opened", "open"),
    ("closed", "close"), ("broke", "break"), ("fixed", "fix"),
    ("cleaned", "clean"), ("watched", "watch"), ("heard", "hear"),
    ("followed", "follow"), ("greeted", "greet"), ("helped", "help"),
    ("served", "serve"), ("taught", "teach"), ("fed", "feed"),
    ("held", "hold"), ("dropped", "drop"), ("caught", "catch"),
    ("threw", "throw"), ("grabbed", "grab"), ("moved", "move"),
    ("visited", "visit"), ("called", "call"), ("thanked", "thank"),
    ("blamed", "blame"), ("hugged", "hug"), ("trained", "train"),
    ("tested", "test"), ("measured", "measure"), ("weighed", "weigh"),
    ("counted", "count"), ("sorted", "sort"), ("packed", "pack"),
    ("loaded", "load"), ("covered", "cover"), ("wrapped", "wrap"),
    ("signed", "sign"), ("copied", "copy"), ("filed", "file"),
    ("studied", "study"), ("sketched", "sketch"),
)

INTRANSITIVE_VERBS = (
    ("slept", "sleep"), ("arrived", "arrive"), ("smiled", "smile"),
    ("laughed", "laugh"), ("waited", "wait"), ("stumbled", "stumble"),
    ("yawned", "yawn"), ("vanished", "vanish"), ("paused", "pause"),
)

ADJECTIVES = (
    "big", "small", "old", "young", "quiet", "loud", "tall", "short",
    "clean", "dirty", "heavy", "light", "warm", "cold", "bright", "dark",
)

ADVERBS = (
    "quickly", "slowly", "quietly", "carefully", "suddenly", "gently",
    "eagerly", "calmly",
)

TIME_ADVERBS = ("Yesterday", "Today", "Recently", "Finally", "Eventually")

TEMPLATES = ("basic", "adj_adv", "time", "pp", "aux")


@dataclass(frozen=True)
class SynthConfig:
    num_sentences: int
    seed: int = 0
    mock_seed: int = 0  # must match the mock embedder seed for pool alignment
    strong_band: tuple[float, float] = (0.75, 1.0)  # |prior| range, strong lemmas
    weak_band: tuple[float, float] = (0.1, 0.35)  # |prior| range, weak lemmas
    weak_rate: float = 0.25  # chance an argument slot draws from the weak pools
    strong_minority: float = 0.08  # strong lemma used against its pool's role
    weak_minority: float = 0.35  # weak lemma used against its pool's role
    intransitive_rate: float = 0.1
    template_weights: dict[str, float] = field(
        default_factory=lambda: {
            "basic": 0.05,
            "adj_adv": 0.35,
            "time": 0.2,
            "pp": 0.1,
            "aux": 0.3,
        }
    )
    id_prefix: str = "synth"


def build_pools(cfg: SynthConfig) -> dict[tuple[str, str], list[str]]:
    """Partition the noun vocabulary by mock lexical prior.

    Keys are (side, strength): side "agent" for positive priors, "patient"
    for negative; strength "strong" or "weak" by |prior| band. Nouns
    outside both bands are discarded, keeping the groups well separated.
    Strong lemmas almost always fill their pool's role, so their role is
    lexically predictable; weak lemmas defect often, and their weak priors
    are what a contextual probe learns to override.
    """
    pools: dict[tuple[str, str], list[str]] = {
        ("agent", "strong"): [],
        ("agent", "weak"): [],
        ("patient", "strong"): [],
        ("patient", "weak"): [],
    }
    for noun in NOUNS:
        prior = lexical_prior(cfg.mock_seed, noun)
        side = "agent" if prior > 0 else "patient"
        magnitude = abs(prior)
        if cfg.strong_band[0] <= magnitude <= cfg.strong_band[1]:
            pools[(side, "strong")].append(noun)
        elif cfg.weak_band[0] <= magnitude <= cfg.weak_band[1]:
            pools[(side, "weak")].append(noun)
    for key, members in pools.items():
        if len(members) < 8:
            raise ConfigError(
                f"pool {key} has only {len(members)} nouns; widen the bands"
            )
    return pools


def _row(i, form, lemma, upos, feats, head, deprel, misc="_"):
    return f"{i}\t{form}\t{lemma}\t{upos}\t_\t{feats}\t{head}\t{deprel}\t_\t{misc}"


def _noun(i, lemma, head, deprel, misc="_"):
    return _row(i, lemma, lemma, "NOUN", "Number=Sing", head, deprel, misc)


def _det(i, form, head):
    return _row(i, form, form.lower(), "DET", "_", head, "det")


def _template_basic(rng, subj, verb, obj):
    # The S V the O .
    vf, vl = verb
    return [
        _det(1, "The", 2),
        _noun(2, subj, 3, "nsubj"),
        _row(3, vf, vl, "VERB", "Tense=Past", 0, "root"),
        _det(4, "the", 5),
        _noun(5, obj, 3, "obj", misc="SpaceAfter=No"),
        _row(6, ".", ".", "PUNCT", "_", 3, "punct"),
    ]


def _template_adj_adv(rng, subj, verb, obj):
    # The ADJ S ADV V the ADJ O .
    vf, vl = verb
    adj1 = rng.choice(ADJECTIVES)
    adj2 = rng.choice(ADJECTIVES)
    adv = rng.choice(ADVERBS)
    return [
        _det(1, "The", 3),
        _row(2, adj1, adj1, "ADJ", "Degree=Pos", 3, "amod"),
        _noun(3, subj, 5, "nsubj"),
        _row(4, adv, adv, "ADV", "_", 5, "advmod"),
        _row(5, vf, vl, "VERB", "Tense=Past", 0, "root"),
        _det(6, "the", 8),
        _row(7, adj2, adj2, "ADJ", "Degree=Pos", 8, "amod"),
        _noun(8, obj, 5, "obj", misc="SpaceAfter=No"),
        _row(9, ".", ".", "PUNCT", "_", 5, "punct"),
    ]


def _template_time(rng, subj, verb, obj):
    # TIME the ADJ S ADV V the O .
    vf, vl = verb
    time = rng.choice(TIME_ADVERBS)
    adj = rng.choice(ADJECTIVES)
    adv = rng.choice(ADVERBS)
    return [
        _row(1, time, time.lower(), "ADV", "_", 6, "advmod"),
        _det(2, "the", 4),
        _row(3, adj, adj, "ADJ", "Degree=Pos", 4, "amod"),
        _noun(4, subj, 6, "nsubj"),
        _row(5, adv, adv, "ADV", "_", 6, "advmod"),
        _row(6, vf, vl, "VERB", "Tense=Past", 0, "root"),
        _det(7, "the", 8),
        _noun(8, obj, 6, "obj", misc="SpaceAfter=No"),
        _row(9, ".", ".", "PUNCT", "_", 6, "punct"),
    ]


def _template_pp(rng, subj, verb, obj):
    # The S ADV V the O near the X .
    vf, vl = verb
    adv = rng.choice(ADVERBS)
    x = rng.choice(NOUNS)
    return [
        _det(1, "The", 2),
        _noun(2, subj, 4, "nsubj"),
        _row(3, adv, adv, "ADV", "_", 4, "advmod"),
        _row(4, vf, vl, "VERB", "Tense=Past", 0, "root"),
        _det(5, "the", 6),
        _noun(6, obj, 4, "obj"),
        _row(7, "near", "near", "ADP", "_", 9, "case"),
        _det(8, "the", 9),
        _noun(9, x, 6, "nmod", misc="SpaceAfter=No"),
        _row(10, ".", ".", "PUNCT", "_", 4, "punct"),
    ]


def _template_intransitive(rng, subj):
    # The S ADV V .
    vf, vl = rng.choice(INTRANSITIVE_VERBS)
    adv = rng.choice(ADVERBS)
    return [
        _det(1, "The", 2),
        _noun(2, subj, 4, "nsubj"),
        _row(3, adv, adv, "ADV", "_", 4, "advmod"),
        _row(4, vf, vl, "VERB", "Tense=Past", 0, "root", misc="SpaceAfter=No"),
        _row(5, ".", ".", "PUNCT", "_", 4, "punct"),
    ]


def _template_aux(rng, subj, verb, obj):
    # The S had ADV V-en the ADJ O .  (regular verbs only: -ed doubles as participle)
    vf, vl = verb
    adv = rng.choice(ADVERBS)
    adj = rng.choice(ADJECTIVES)
    return [
        _det(1, "The", 2),
        _noun(2, subj, 5, "nsubj"),
        _row(3, "had", "have", "AUX", "Tense=Past", 5, "aux"),
        _row(4, adv, adv, "ADV", "_", 5, "advmod"),
        _row(5, vf, vl, "VERB", "Tense=Past|VerbForm=Part", 0, "root"),
        _det(6, "the", 8),
        _row(7, adj, adj, "ADJ", "Degree=Pos", 8, "amod"),
        _noun(8, obj, 5, "obj", misc="SpaceAfter=No"),
        _row(9, ".", ".", "PUNCT", "_", 5, "punct"),
    ]


# past forms that double as participles, for the aux template
REGULAR_VERBS = tuple(
    (form, lemma) for form, lemma in VERBS if form.endswith("ed") or form.endswith("t")
)

_TEMPLATE_FNS = {
    "basic": _template_basic,
    "adj_adv": _template_adj_adv,
    "time": _template_time,
    "pp": _template_pp,
    "aux": _template_aux,
}


def _draw_argument(rng, cfg: SynthConfig, pools, role_side: str) -> str:
    """Pick a noun for an argument slot.

    role_side is the pool side matching the slot ("agent" for subjects,
    "patient" for objects). The draw defects to the opposite side at the
    strength-specific minority rate, so strong lemmas nearly always play
    their expected role while weak lemmas defect often.
    """
    strength = "weak" if rng.random() < cfg.weak_rate else "strong"
    minority = cfg.weak_minority if strength == "weak" else cfg.strong_minority
    side = role_side
    if rng.random() < minority:
        side = "patient" if role_side == "agent" else "agent"
    return rng.choice(pools[(side, strength)])


def generate_corpus(cfg: SynthConfig) -> list[Sentence]:
    rng = random.Random(cfg.seed)
    pools = build_pools(cfg)
    names = sorted(cfg.template_weights)
    weights = [cfg.template_weights[name] for name in names]
    blocks = []
    for i in range(cfg.num_sentences):
        sent_id = f"{cfg.id_prefix}-{i:05d}"
        if rng.random() < cfg.intransitive_rate:
            rows = _template_intransitive(rng, _draw_argument(rng, cfg, pools, "agent"))
        else:
            template = rng.choices(names, weights=weights)[0]
            subj = _draw_argument(rng, cfg, pools, "agent")
            obj = _draw_argument(rng, cfg, pools, "patient")
            while obj == subj:
                obj = _draw_argument(rng, cfg, pools, "patient")
            verb = rng.choice(REGULAR_VERBS if template == "aux" else VERBS)
            rows = _TEMPLATE_FNS[template](rng, subj, verb, obj)
        blocks.append("\n".join([f"# sent_id = {sent_id}"] + rows))
    return parse_conllu("\n\n".join(blocks) + "\n")
