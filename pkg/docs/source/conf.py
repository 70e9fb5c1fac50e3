# -*- coding: utf-8 -*-
#
# explicable-design documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

__here__ = os.path.abspath(os.path.dirname(__file__))

# autodoc imports the package from the repository root
sys.path.insert(0, os.path.abspath(os.path.join(__here__, '..', '..')))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'explicable-design'
copyright = u'2024, the explicable-design developers'

# The short X.Y version and the full version, including alpha/beta/rc tags.
exec(open(os.path.join(__here__, '..', '..', 'explicable_design', '_version.py')).read())
version = __version__
release = __version__

exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'explicable-designdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'explicable-design.tex', u'explicable-design Documentation',
   u'the explicable-design developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'explicable-design', u'explicable-design Documentation',
     [u'the explicable-design developers'], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
  ('index', 'explicable-design', u'explicable-design Documentation',
   u'the explicable-design developers', 'explicable-design',
   'Explicable planning and environment design for explicability.', 'Miscellaneous'),
]
