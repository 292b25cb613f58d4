"""gentl: generative timeline engine and HTTP service.

Build, explore, and persist LLM-generated timelines of historical events:
contextual event generation, relationship discovery with inline event
references, source citations, and semantic zoom.
"""

__version__ = "0.1.0"
