"""Reference locations carried in report ``paper_anchor`` fields.

The report schema requires every check to point at the statement it audits;
the strings live here so that the rest of the code refers to them by key.
"""

ANCHORS = {
    "coadjoint": "Lemma 2.1",
    "stabilizer": "Cor 2.2",
    "lemma27": "Lemma 2.7",
    "lemma32": "Lemma 3.2",
    "prop28": "Prop 2.8",
    "prop33": "Prop 3.3",
    "illustration": "Sec 2.1 Illustration",
    "hamiltonian": "Eq (2h)",
    "kupershmidt": "Sec 2.1.1",
    "rescale": "Eq (6a)",
    "commutator": "Eq (2d)",
    "selfadjoint": "Def 2.4",
    "eq1a": "Eq (1a)",
    "eq1b": "Eq (1b)",
    "eq24a": "Eq (24a)",
    "eq24b": "Eq (24b)",
    "eq25a": "Eq (25a)",
    "eq25b": "Eq (25b)",
    "eq101": "Eq (101)",
    "eq102": "Eq (102)",
    "eq103": "Eq (103)",
    "eq104": "Eq (104)",
    "eq105": "Eq (105)",
    "eq106": "Eq (106)",
    "eq107": "Eq (107)",
    "eq108": "Eq (108)",
    "table1": "Table 1",
    "table2": "Table 2",
    "symmetry": "Eqs (6.2)-(6.4)",
    "eq7_1": "Eq (7.1)",
    "eq7_3": "Eq (7.3)",
    "eq7_4": "Eq (7.4)",
    "eq7_5": "Eq (7.5)",
    "eq7_6": "Eq (7.6)",
    "eq7_7": "Eq (7.7)",
    "soliton": "Sec 5",
}


def anchor(key: str) -> str:
    return ANCHORS[key]
