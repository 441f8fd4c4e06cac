"""Compile CNF relational specifications into a synthesis-friendly NNF.

Submodules:

``nnf``, ``nnf_format``
    hash-consed NNF DAGs and the ``.nnf`` text format;
``cnf``
    clause sets, QDIMACS parsing, clause-graph components;
``sat``
    Tseitin encoding, SAT sessions and a CEGAR 2QBF check;
``synnnf``
    reducts, and-unrealizability, membership and DNNF-family validators;
``skolem``
    canonical Skolem vectors, quantifier elimination, the error formula;
``refine``
    refinement checks, f-def discovery, pivoting;
``c2syn``
    the recursive CNF compiler;
``oracle``
    truth-table reference semantics and instance generators.
"""

__version__ = "0.1.0"
