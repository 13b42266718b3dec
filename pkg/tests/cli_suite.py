"""Commands exercising every verb, shared by the CLI tests and the determinism check.

Each entry: (schema name, argv, expected exit status).
"""

SUITE = [
    ("rewrite_nf", ["rewrite", "nf", "stt", "(eps (alpha (alpha dimp dtop) dbot))"], 0),
    ("rewrite_nf", ["rewrite", "nf", "pimpq", "P", "--fuel", "50"], 1),
    ("rewrite_cong", ["rewrite", "cong", "pimpq", "P", "(=> P Q)"], 0),
    ("rewrite_cong", ["rewrite", "cong", "stt", "true", "false"], 1),
    ("check", ["check", "pimpq", "paper_q_proof.sexp"], 0),
    ("check", ["check", "qimpp", "paper_q_proof.sexp"], 1),
    ("classify", ["classify", "paper_q_proof.sexp"], 0),
    ("normalize", ["normalize", "pimpq", "paper_q_proof.sexp", "--fuel", "100"], 1),
    ("normalize", ["normalize", "stt", "proof_refl.sexp"], 0),
    ("tva_report", ["tva", "validate", "bool2"], 0),
    ("tva_report", ["tva", "validate", "chain3.json"], 0),
    ("tva_from_heyting", ["tva", "from-heyting", "diamond.json"], 0),
    ("model_report", ["model", "check", "qimpp", "qimpp_model.json"], 0),
    ("model_report", ["model", "check", "qimpp", "qimpp_bad.json"], 1),
    ("model_report", ["model", "check", "subset", "subset_bool2.json"], 0),
    ("model_report", ["model", "check", "stt", "stt_chain3.json"], 0),
    ("model_eval", ["model", "eval", "subset_bool2.json", "(mem x y)", "--assign", "x=0", "--assign", "y=1"], 0),
    ("theory", ["theory", "show", "subset"], 0),
    ("sample", ["sample", "qimpp", "--count", "15"], 0),
    ("sample", ["sample", "subset", "--count", "10", "--depth", "4"], 0),
]
