from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from .config import get_settings
from .routes import decide, generate

app = FastAPI(title="antichainer API")

app.add_middleware(
    CORSMiddleware,
    allow_origins=get_settings().origins,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(decide.router)
app.include_router(generate.router)


@app.get("/health")
async def health():
    return {"status": "ok"}
