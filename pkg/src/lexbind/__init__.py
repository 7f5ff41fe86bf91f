"""lexbind: force pre-specified bilingual phrase pairs into a neural translator.

The toolkit covers the full desk-scale loop: mining a bilingual lexicon from
a parallel corpus and a phrase table, annotating corpora with the tagging /
replacement / mixed-phrase schemes (plus a token-type channel), subword
segmentation with protected tokens, a shared target-first vocabulary with a
restricted decoder output, a small encoder-decoder transformer trained from
scratch, and constraint-satisfaction / BLEU evaluation.
"""

__version__ = "0.1.0"
